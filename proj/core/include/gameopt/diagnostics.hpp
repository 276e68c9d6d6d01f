#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gameopt/bounds.hpp"
#include "gameopt/dynkin.hpp"
#include "gameopt/model.hpp"
#include "gameopt/parallel.hpp"
#include "gameopt/payoff.hpp"

namespace gameopt {

/// A Monte Carlo estimate next to an exact bound. The bound is kept in log
/// form as well, since some constants overflow a double. Compliance means
/// estimate - 2 std_error <= bound.
struct BoundCheck {
    Estimate estimate;
    double bound = 0.0;      // +inf when exp(log_bound) overflows
    double log_bound = 0.0;
    bool compliant = false;
};

BoundCheck make_bound_check(const Estimate& estimate, double log_bound);

/// E sup_t |X_N(t) - Xi(t)|^2 over `reps` coupled pairs on the fine grid
/// M = refine * N. Replication r uses stream r. The coupling needs Gaussian
/// innovations: a finitely supported `law` raises UnsupportedLaw.
Estimate strong_error(const DiffusionModel& model, const InnovationLaw& law, int n_steps, int refine,
                      std::size_t reps, std::uint64_t seed, int jobs = 1);

/// E sup_t |X_N(t) - Xhat_N(t)|^2 against 136 L^8 N^{-1/2}, with L the
/// effective constant of model and law.
BoundCheck coarse_error(const DiffusionModel& model, const InnovationLaw& law, int n_steps, std::size_t reps,
                        std::uint64_t seed, int jobs = 1);

/// f_n(x, w) = E exp(i <w, n^{-1/2} sum_{k<=n} sigma xi(k)>), computed exactly:
/// the atom characteristic function raised to the n-th power for finite
/// laws, the Gaussian closed form otherwise.
std::complex<double> characteristic_function(const Matrix& sigma, const InnovationLaw& law,
                                             std::span<const double> w, int n);

struct CfDistance {
    double max_deviation = 0.0;
    std::vector<double> worst_w;
    double radius = 0.0;  // n^{1/12}
    std::size_t points = 0;
    double bound = 0.0;   // C_1 n^{-1/6}
    bool compliant = false;
};

/// Largest |f_n(x, w) - exp(-<A w, w>/2)| over the origin, axis points and
/// `w_samples` Halton points of the ball |w| <= n^{1/12}. The Halton sequence
/// starts at an offset derived from `seed`. `lip` is the L of the bound.
CfDistance cf_distance(const Matrix& sigma, const InnovationLaw& law, int n, std::size_t w_samples,
                       std::uint64_t seed, double lip);

/// E exp(m max_n |X_N(n/N)|) against D^X_m e^{m|x0|} N^delta.
BoundCheck exp_moment(const DiffusionModel& model, const InnovationLaw& law, int n_steps, double m,
                      std::size_t reps, double delta, std::uint64_t seed, int jobs = 1);

struct ConvergenceRow {
    int n_steps = 0;
    double value = 0.0;
    double difference = 0.0;  // |V_N - V_prev| against the previous successful row; NaN for the first
    std::size_t nodes = 0;
    std::string status = "ok";
};

/// Game values V_N along `n_list` with successive differences. Rows whose
/// tree cannot be built carry the error in `status` and are skipped when
/// differencing.
std::vector<ConvergenceRow> value_convergence(const DiffusionModel& model, const InnovationLaw& law,
                                              const PayoffPair& payoffs, const std::vector<int>& n_list,
                                              std::size_t node_cap, bool recombine, int jobs = 1);

/// True when the differences of the successful rows never increase.
bool differences_nonincreasing(const std::vector<ConvergenceRow>& rows);

}  // namespace gameopt
