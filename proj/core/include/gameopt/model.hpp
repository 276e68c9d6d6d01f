#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gameopt/types.hpp"
#include "gameopt/validation.hpp"

namespace gameopt {

using MatrixField = std::function<Matrix(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

/// Time-homogeneous diffusion dXi = sigma(Xi) dW + drift(Xi) dt with a
/// declared joint bound / Lipschitz constant.
struct DiffusionModel {
    int dim = 1;
    MatrixField sigma;
    VectorField drift;
    double lip_bound = 1.0;
    Vector x0 = Vector::Zero(1);
    std::string id = "custom";
    /// Set when sigma and drift do not depend on the state; enables the
    /// exact-recombination shortcuts in tree construction.
    bool constant_coefficients = false;

    /// sigma(x), shape-checked against `dim`.
    Matrix sigma_at(const Vector& x) const;
    /// drift(x), shape-checked against `dim`.
    Vector drift_at(const Vector& x) const;
    /// A(x) = sigma(x) sigma(x)^T.
    Matrix diffusion_matrix(const Vector& x) const;

    /// Throws ShapeError unless dim, x0 and the coefficient outputs agree.
    void check_shapes() const;
};

/// Law of the i.i.d. innovations xi(n): either finitely supported or
/// standard Gaussian (the latter is admitted for coupling diagnostics only).
class InnovationLaw {
public:
    enum class Kind { finite_support, gaussian };

    /// Finitely supported law. Throws InvalidInput on negative or zero
    /// probabilities or empty support, ShapeError on mismatched atom
    /// dimensions; moment
    /// conditions are checked by validate_innovations, not here.
    static InnovationLaw finite(int dim, std::vector<Vector> atoms, std::vector<double> probabilities,
                                std::string id = "custom");
    static InnovationLaw gaussian(int dim);
    /// Product of independent symmetric +-1 coordinates (2^dim atoms).
    static InnovationLaw rademacher(int dim);
    /// Three-point law {-sqrt3, 0, sqrt3} with weights {1/6, 2/3, 1/6}, per coordinate.
    static InnovationLaw trinomial(int dim);

    int dim() const noexcept { return dim_; }
    Kind kind() const noexcept { return kind_; }
    bool is_finite() const noexcept { return kind_ == Kind::finite_support; }
    const std::string& id() const noexcept { return id_; }
    const std::vector<Vector>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& probabilities() const noexcept { return probabilities_; }
    std::size_t atom_count() const noexcept { return atoms_.size(); }
    /// Largest atom norm; +infinity for the Gaussian law.
    double norm_bound() const noexcept { return norm_bound_; }

    /// Draws one innovation; `atom` receives the atom index (0 for Gaussian).
    template <typename Stream>
    Vector draw(Stream& rng, std::size_t& atom) const {
        if (kind_ == Kind::gaussian) {
            Vector v(dim_);
            for (int i = 0; i < dim_; ++i) v[i] = rng.normal();
            atom = 0;
            return v;
        }
        atom = rng.categorical(cumulative_);
        return atoms_[atom];
    }

private:
    int dim_ = 1;
    Kind kind_ = Kind::gaussian;
    std::string id_;
    std::vector<Vector> atoms_;
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
    double norm_bound_ = std::numeric_limits<double>::infinity();
};

/// Effective constant L = max(model bound, innovation norm bound). The
/// Gaussian law has no norm bound; the model bound is used and the caller is
/// expected to flag the result.
double effective_lip_bound(const DiffusionModel& model, const InnovationLaw& law);

/// Probe-based check of the boundedness and Lipschitz inequalities for sigma
/// and drift on the cube [-probe_radius, probe_radius]^d (axis points,
/// corners and `probe_count` pseudo-random points). Deterministic in `seed`.
ValidationReport validate_model(const DiffusionModel& model, int probe_count, double probe_radius,
                                std::uint64_t seed);

/// Exact moment checks on the atoms: probability sum, mean, covariance and
/// norm bound, each to 1e-12.
ValidationReport validate_innovations(const InnovationLaw& law);

/// Drift b_i(x) = -1/2 sum_j sigma_ij(x)^2, under which exp(Xi_i) are local
/// martingales.
VectorField martingale_drift(MatrixField sigma, int dim);

/// Built-in models: "gbm-1d", "gbm-2d", "tanh-1d", "sine-1d", "bump-1d",
/// "bm-1d", "bm-2d", "zero-1d", "drift-1d". Throws InvalidInput otherwise.
DiffusionModel model_preset(const std::string& id);
std::vector<std::string> model_preset_ids();

/// Built-in laws: "rademacher-<d>d", "trinomial-<d>d", "gaussian-<d>d".
InnovationLaw law_preset(const std::string& id);

/// Model from closed-form expressions: `sigma` holds dim*dim row-major
/// entries, `drift` holds dim entries, or is {"martingale"} to request
/// martingale_drift.
DiffusionModel model_from_expressions(int dim, const std::vector<std::string>& sigma,
                                      const std::vector<std::string>& drift, double lip_bound,
                                      const Vector& x0, std::string id = "inline");

}  // namespace gameopt
