#include "gameopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gameopt/expression.hpp"
#include "gameopt/rng.hpp"

namespace gameopt {

namespace {

constexpr double kExactTol = 1e-12;

std::string format_vector(const Vector& x) {
    std::ostringstream out;
    out.precision(17);
    out << '(';
    for (int i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
    out << ')';
    return out.str();
}

Vector constant_vector(std::initializer_list<double> values) {
    Vector v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

DiffusionModel constant_model(std::string id, Matrix sigma, Vector drift, double lip_bound) {
    DiffusionModel m;
    m.dim = static_cast<int>(sigma.rows());
    m.sigma = [sigma](const Vector&) { return sigma; };
    m.drift = [drift](const Vector&) { return drift; };
    m.lip_bound = lip_bound;
    m.x0 = Vector::Zero(m.dim);
    m.id = std::move(id);
    m.constant_coefficients = true;
    return m;
}

DiffusionModel scalar_model(std::string id, std::function<double(double)> sigma,
                            std::function<double(double)> drift, double lip_bound) {
    DiffusionModel m;
    m.dim = 1;
    m.sigma = [sigma = std::move(sigma)](const Vector& x) {
        Matrix s(1, 1);
        s(0, 0) = sigma(x[0]);
        return s;
    };
    m.drift = [drift = std::move(drift)](const Vector& x) {
        Vector b(1);
        b[0] = drift(x[0]);
        return b;
    };
    m.lip_bound = lip_bound;
    m.x0 = Vector::Zero(1);
    m.id = std::move(id);
    return m;
}

}  // namespace

Matrix DiffusionModel::sigma_at(const Vector& x) const {
    Matrix s = sigma(x);
    if (s.rows() != dim || s.cols() != dim)
        throw ShapeError("sigma returned a " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + " matrix, expected " + std::to_string(dim) +
                         "x" + std::to_string(dim));
    return s;
}

Vector DiffusionModel::drift_at(const Vector& x) const {
    Vector b = drift(x);
    if (b.size() != dim)
        throw ShapeError("drift returned " + std::to_string(b.size()) + " components, expected " +
                         std::to_string(dim));
    return b;
}

Matrix DiffusionModel::diffusion_matrix(const Vector& x) const {
    const Matrix s = sigma_at(x);
    return s * s.transpose();
}

void DiffusionModel::check_shapes() const {
    check_dim(dim);
    if (!sigma || !drift) throw ShapeError("model '" + id + "' is missing a coefficient function");
    if (x0.size() != dim)
        throw ShapeError("x0 has " + std::to_string(x0.size()) + " components, expected " +
                         std::to_string(dim));
    sigma_at(x0);
    drift_at(x0);
}

InnovationLaw InnovationLaw::finite(int dim, std::vector<Vector> atoms,
                                    std::vector<double> probabilities, std::string id) {
    check_dim(dim);
    if (atoms.empty()) throw InvalidInput("innovation law '" + id + "' has no atoms");
    if (atoms.size() != probabilities.size())
        throw InvalidInput("innovation law '" + id + "': atom and probability counts differ");
    InnovationLaw law;
    law.dim_ = dim;
    law.kind_ = Kind::finite_support;
    law.id_ = std::move(id);
    law.norm_bound_ = 0.0;
    double running = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].size() != dim)
            throw ShapeError("innovation atom " + std::to_string(i) + " has dimension " +
                             std::to_string(atoms[i].size()) + ", expected " + std::to_string(dim));
        if (!(probabilities[i] > 0.0))
            throw InvalidInput("innovation law '" + law.id_ + "': probability of atom " +
                               std::to_string(i) + " is not positive");
        law.norm_bound_ = std::max(law.norm_bound_, atoms[i].norm());
        running += probabilities[i];
        law.cumulative_.push_back(running);
    }
    law.atoms_ = std::move(atoms);
    law.probabilities_ = std::move(probabilities);
    return law;
}

InnovationLaw InnovationLaw::gaussian(int dim) {
    check_dim(dim);
    InnovationLaw law;
    law.dim_ = dim;
    law.kind_ = Kind::gaussian;
    law.id_ = "gaussian-" + std::to_string(dim) + "d";
    return law;
}

namespace {

InnovationLaw product_law(int dim, const std::vector<double>& values, const std::vector<double>& weights,
                          const std::string& name) {
    check_dim(dim);
    const std::size_t m = values.size();
    std::size_t count = 1;
    for (int i = 0; i < dim; ++i) count *= m;
    std::vector<Vector> atoms;
    std::vector<double> probs;
    atoms.reserve(count);
    probs.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
        Vector a(dim);
        double p = 1.0;
        std::size_t rest = code;
        for (int i = 0; i < dim; ++i) {
            const std::size_t digit = rest % m;
            rest /= m;
            a[i] = values[digit];
            p *= weights[digit];
        }
        atoms.push_back(a);
        probs.push_back(p);
    }
    return InnovationLaw::finite(dim, std::move(atoms), std::move(probs),
                                 name + "-" + std::to_string(dim) + "d");
}

}  // namespace

InnovationLaw InnovationLaw::rademacher(int dim) {
    return product_law(dim, {1.0, -1.0}, {0.5, 0.5}, "rademacher");
}

InnovationLaw InnovationLaw::trinomial(int dim) {
    const double r = std::sqrt(3.0);
    return product_law(dim, {r, 0.0, -r}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, "trinomial");
}

double effective_lip_bound(const DiffusionModel& model, const InnovationLaw& law) {
    if (!law.is_finite()) return model.lip_bound;
    return std::max(model.lip_bound, law.norm_bound());
}

ValidationReport validate_model(const DiffusionModel& model, int probe_count, double probe_radius,
                                std::uint64_t seed) {
    if (probe_count < 1) throw InvalidInput("probe_count must be at least 1");
    if (!(probe_radius > 0.0)) throw InvalidInput("probe_radius must be positive");
    model.check_shapes();
    const int d = model.dim;
    const double lip = model.lip_bound;

    std::vector<Vector> probes;
    probes.push_back(Vector::Zero(d));
    for (int i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector e = Vector::Zero(d);
            e[i] = sign * probe_radius;
            probes.push_back(e);
        }
    }
    if (d > 1) {
        for (int corner = 0; corner < (1 << d); ++corner) {
            Vector c(d);
            for (int i = 0; i < d; ++i) c[i] = (corner >> i & 1) ? probe_radius : -probe_radius;
            probes.push_back(c);
        }
    }
    RandomStream rng(seed, 0, Substream::probes);
    for (int k = 0; k < probe_count; ++k) {
        Vector x(d);
        for (int i = 0; i < d; ++i) x[i] = (2.0 * rng.uniform() - 1.0) * probe_radius;
        probes.push_back(x);
    }

    // Pairs: consecutive probes plus a nearby partner for each probe.
    const double h = 1e-4 * probe_radius;
    std::vector<std::pair<Vector, Vector>> pairs;
    for (std::size_t k = 0; k + 1 < probes.size(); ++k) pairs.emplace_back(probes[k], probes[k + 1]);
    for (const auto& x : probes) {
        Vector dir(d);
        for (int i = 0; i < d; ++i) dir[i] = 2.0 * rng.uniform() - 1.0;
        const double n = dir.norm();
        if (n == 0.0) dir[0] = 1.0;
        else dir /= n;
        pairs.emplace_back(x, x + h * dir);
    }

    double sigma_bound = -std::numeric_limits<double>::infinity();
    double drift_bound = sigma_bound;
    Vector sigma_at = probes.front(), drift_at = probes.front();
    for (const auto& x : probes) {
        const double s = model.sigma_at(x).norm() - lip;
        const double b = model.drift_at(x).norm() - lip;
        if (s > sigma_bound) sigma_bound = s, sigma_at = x;
        if (b > drift_bound) drift_bound = b, drift_at = x;
    }

    double sigma_lip = -std::numeric_limits<double>::infinity();
    double drift_lip = sigma_lip;
    std::string sigma_lip_at, drift_lip_at;
    for (const auto& [x, y] : pairs) {
        const double dist = (x - y).norm();
        const double s = (model.sigma_at(x) - model.sigma_at(y)).norm() - lip * dist;
        const double b = (model.drift_at(x) - model.drift_at(y)).norm() - lip * dist;
        if (s > sigma_lip) sigma_lip = s, sigma_lip_at = format_vector(x) + " vs " + format_vector(y);
        if (b > drift_lip) drift_lip = b, drift_lip_at = format_vector(x) + " vs " + format_vector(y);
    }

    ValidationReport report;
    report.subject = "model:" + model.id;
    {
        std::ostringstream desc;
        desc.precision(17);
        desc << probes.size() << " points and " << pairs.size() << " pairs in [-" << probe_radius
             << ", " << probe_radius << "]^" << d << ", seed " << seed;
        report.probe_description = desc.str();
    }
    const double tol = kExactTol * std::max(1.0, lip);
    report.add("L >= 1", 1.0 - lip, 0.0, "L = " + std::to_string(lip));
    report.add("|sigma(x)| <= L", sigma_bound, tol, "x = " + format_vector(sigma_at));
    report.add("|b(x)| <= L", drift_bound, tol, "x = " + format_vector(drift_at));
    report.add("|sigma(x)-sigma(y)| <= L|x-y|", sigma_lip, tol, sigma_lip_at);
    report.add("|b(x)-b(y)| <= L|x-y|", drift_lip, tol, drift_lip_at);
    return report;
}

ValidationReport validate_innovations(const InnovationLaw& law) {
    ValidationReport report;
    report.subject = "law:" + law.id();
    const int d = law.dim();
    if (!law.is_finite()) {
        report.probe_description = "gaussian law: moments hold by construction";
        report.add("sum p = 1", 0.0, kExactTol);
        report.add("E xi = 0", 0.0, kExactTol);
        report.add("E xi xi^T = I", 0.0, kExactTol);
        report.flags.push_back("gaussian-diagnostic-only: |xi| <= L fails (unbounded support)");
        return report;
    }
    report.probe_description = std::to_string(law.atom_count()) + " atoms, exact moment sums";

    const auto& atoms = law.atoms();
    const auto& probs = law.probabilities();
    double total = 0.0;
    Vector mean = Vector::Zero(d);
    Matrix cov = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        total += probs[k];
        mean += probs[k] * atoms[k];
        cov += probs[k] * atoms[k] * atoms[k].transpose();
    }
    const double sum_err = std::abs(total - 1.0);
    report.add("sum p = 1", sum_err, kExactTol, "sum = " + std::to_string(total));
    report.add("E xi = 0", mean.norm(), kExactTol, "mean = " + format_vector(mean));
    const double cov_err = (cov - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    std::ostringstream cov_text;
    cov_text.precision(17);
    cov_text << "max |cov - I| entry " << cov_err;
    report.add("E xi xi^T = I", cov_err, kExactTol, cov_text.str());
    std::ostringstream bound_text;
    bound_text.precision(17);
    bound_text << "L_xi = " << law.norm_bound();
    // The norm bound is recorded, not assumed: its margin is 0 by definition.
    report.add("|xi| <= L_xi", 0.0, kExactTol, bound_text.str());
    return report;
}

VectorField martingale_drift(MatrixField sigma, int dim) {
    check_dim(dim);
    return [sigma = std::move(sigma), dim](const Vector& x) {
        const Matrix s = sigma(x);
        if (s.rows() != dim || s.cols() != dim)
            throw ShapeError("sigma returned a " + std::to_string(s.rows()) + "x" +
                             std::to_string(s.cols()) + " matrix, expected " + std::to_string(dim) +
                             "x" + std::to_string(dim));
        Vector b(dim);
        for (int i = 0; i < dim; ++i) b[i] = -0.5 * s.row(i).squaredNorm();
        return b;
    };
}

std::vector<std::string> model_preset_ids() {
    return {"gbm-1d", "gbm-2d", "tanh-1d", "sine-1d", "bump-1d", "bm-1d", "bm-2d", "zero-1d", "drift-1d"};
}

DiffusionModel model_preset(const std::string& id) {
    if (id == "gbm-1d") {
        Matrix s(1, 1);
        s(0, 0) = 0.2;
        DiffusionModel m = constant_model(id, s, constant_vector({0.0}), 1.0);
        m.drift = martingale_drift(m.sigma, 1);
        return m;
    }
    if (id == "gbm-2d") {
        Matrix s(2, 2);
        s << 0.2, 0.0, 0.1, 0.25;
        DiffusionModel m = constant_model(id, s, constant_vector({0.0, 0.0}), 1.0);
        m.drift = martingale_drift(m.sigma, 2);
        return m;
    }
    if (id == "tanh-1d")
        return scalar_model(id, [](double x) { return 0.4 + 0.2 * std::tanh(x); },
                            [](double) { return 0.0; }, 1.0);
    if (id == "sine-1d")
        return scalar_model(id, [](double x) { return 1.0 + 0.5 * std::sin(x); },
                            [](double x) { return 0.25 * std::cos(x); }, 2.0);
    if (id == "bump-1d")
        return scalar_model(id, [](double x) { return 1.0 / (1.0 + x * x) + 1.0; },
                            [](double) { return 0.0; }, 2.0);
    if (id == "bm-1d") return constant_model(id, Matrix::Identity(1, 1), constant_vector({0.0}), 1.0);
    if (id == "bm-2d")
        return constant_model(id, Matrix::Identity(2, 2), constant_vector({0.0, 0.0}), std::sqrt(2.0));
    if (id == "zero-1d") return constant_model(id, Matrix::Zero(1, 1), constant_vector({0.0}), 1.0);
    if (id == "drift-1d") return constant_model(id, Matrix::Zero(1, 1), constant_vector({1.0}), 1.0);
    throw InvalidInput("unknown model preset '" + id + "'");
}

InnovationLaw law_preset(const std::string& id) {
    const auto dash = id.rfind('-');
    if (dash == std::string::npos || id.size() < dash + 3 || id.back() != 'd')
        throw InvalidInput("unknown law preset '" + id + "'");
    const std::string family = id.substr(0, dash);
    int dim = 0;
    try {
        dim = std::stoi(id.substr(dash + 1, id.size() - dash - 2));
    } catch (const std::exception&) {
        throw InvalidInput("unknown law preset '" + id + "'");
    }
    if (family == "rademacher") return InnovationLaw::rademacher(dim);
    if (family == "trinomial") return InnovationLaw::trinomial(dim);
    if (family == "gaussian") return InnovationLaw::gaussian(dim);
    throw InvalidInput("unknown law preset '" + id + "'");
}

DiffusionModel model_from_expressions(int dim, const std::vector<std::string>& sigma,
                                      const std::vector<std::string>& drift, double lip_bound,
                                      const Vector& x0, std::string id) {
    check_dim(dim);
    if (sigma.size() != static_cast<std::size_t>(dim * dim))
        throw ShapeError("sigma needs " + std::to_string(dim * dim) + " entries, got " +
                         std::to_string(sigma.size()));
    std::vector<Expression> s;
    bool constant = true;
    for (const auto& text : sigma) {
        s.push_back(Expression::parse(text, dim));
        constant = constant && s.back().is_constant();
    }
    DiffusionModel m;
    m.dim = dim;
    m.sigma = [s, dim](const Vector& x) {
        Matrix out(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out(i, j) = s[static_cast<std::size_t>(i * dim + j)](x);
        return out;
    };
    if (drift.size() == 1 && drift.front() == "martingale") {
        m.drift = martingale_drift(m.sigma, dim);
    } else {
        if (drift.size() != static_cast<std::size_t>(dim))
            throw ShapeError("drift needs " + std::to_string(dim) + " entries, got " +
                             std::to_string(drift.size()));
        std::vector<Expression> b;
        for (const auto& text : drift) {
            b.push_back(Expression::parse(text, dim));
            constant = constant && b.back().is_constant();
        }
        m.drift = [b, dim](const Vector& x) {
            Vector out(dim);
            for (int i = 0; i < dim; ++i) out[i] = b[static_cast<std::size_t>(i)](x);
            return out;
        };
    }
    m.lip_bound = lip_bound;
    m.x0 = x0;
    m.id = std::move(id);
    m.constant_coefficients = constant;
    m.check_shapes();
    return m;
}

}  // namespace gameopt
