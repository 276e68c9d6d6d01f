#include "gameopt/bounds.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gameopt/scheme.hpp"

namespace gameopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow.
double log_add(double a, double b) {
    if (a == kInf || b == kInf) return kInf;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double block_size(double n_steps) {
    if (n_steps <= 4.0e18) return integer_fourth_root(static_cast<std::int64_t>(n_steps));
    return std::floor(std::pow(n_steps, 0.25));
}

}  // namespace

double TheoreticalBounds::cf_constant() const { return 1.5 * std::pow(lip, 6); }

double TheoreticalBounds::cf_bound(double n) const { return cf_constant() * std::pow(n, -kCfExponent); }

double TheoreticalBounds::coarse_constant() const { return 136.0 * std::pow(lip, 8); }

double TheoreticalBounds::coarse_bound(double n_steps) const {
    return coarse_constant() / std::sqrt(n_steps);
}

double TheoreticalBounds::log_dx(double m) const {
    const double d = dim;
    const double inner = m * d * d * lip * lip;
    const double tail = std::pow(m, 3) * std::pow(d, 6) * std::pow(lip, 6) * std::exp(inner) / 6.0;
    return std::log(2.0 * d) + 0.5 * std::pow(d, 4) * std::pow(lip, 4) + lip + tail;
}

double TheoreticalBounds::dx(double m) const { return std::exp(log_dx(m)); }

double TheoreticalBounds::log_dx_delta(double m, double delta) const {
    return log_add(0.0, 0.5 * (log_dx(2.0 * m / delta) + log_dx(2.0 * m)));
}

double TheoreticalBounds::dxi(double m) const {
    return 2.0 * std::exp(lip + 0.5 * m * lip * lip * dim * dim);
}

double TheoreticalBounds::log_exp_moment_bound(double m, double delta, double x0_norm, double n_steps) const {
    return log_dx(m) + m * x0_norm + delta * std::log(n_steps);
}

double TheoreticalBounds::log_coarse_game_budget(double k_reg, double delta, double x0_norm,
                                                 double n_steps) const {
    return log_dx_delta(k_reg, delta) + std::log(k_reg) + k_reg * x0_norm +
           (delta - 0.25) * std::log(n_steps) + std::log(1.0 + lip + lip * lip);
}

double TheoreticalBounds::log_frozen_game_budget(double k_reg, double delta, double x0_norm,
                                                 double n_steps) const {
    return std::log(24.0) + 0.5 * log_dx_delta(4.0 * k_reg, delta) + k_reg * x0_norm + 4.0 * std::log(lip) +
           0.5 * (delta - 0.5) * std::log(n_steps);
}

std::string TheoreticalBounds::n0_decimal() const {
    using boost::multiprecision::cpp_int;
    const cpp_int base = cpp_int(100'000'000) * dim;
    const cpp_int inner = cpp_int(boost::multiprecision::pow(base, static_cast<unsigned>(24 * dim))) + 1;
    const cpp_int n0 = boost::multiprecision::pow(inner, 4u);
    return n0.str();
}

double TheoreticalBounds::log10_n0() const {
    // ((10^8 d)^{24d} + 1)^4; the +1 is far below double resolution.
    return 4.0 * 24.0 * dim * (8.0 + std::log10(static_cast<double>(dim)));
}

double TheoreticalBounds::strong_exponent() const { return 1.0 / (50.0 * dim); }

double TheoreticalBounds::value_exponent(double delta) const { return delta - 1.0 / (100.0 * dim); }

double TheoreticalBounds::c2() const {
    // sup_N [N^{1/4}]^{-a} sqrt(log N) with a = 1/(480 d).
    const double a = 1.0 / (480.0 * dim);
    double sup = 0.0;
    for (std::int64_t n = 2; n <= 1'000'000; ++n) {
        const double q = integer_fourth_root(n);
        sup = std::max(sup, std::pow(q, -a) * std::sqrt(std::log(static_cast<double>(n))));
    }
    // Beyond 10^6, [N^{1/4}] = N^{1/4}(1 - O(10^{-1.5})); the continuous
    // maximum of N^{-a/4} sqrt(log N) sits at log N = 2/a.
    sup = std::max(sup, std::exp(-0.5) * std::sqrt(2.0 / a));
    const double d = dim;
    const double l2 = lip * lip;
    const double c1 = cf_constant();
    return sup * (1.0 + 4.0 * l2 * (l2 + d) + 2.0 * l2 * d) *
           (1.0 + std::sqrt(2.0 * std::sqrt(c1)) + 2.0 * std::sqrt(lip * std::sqrt(d)));
}

double TheoreticalBounds::c3() const { return 408.0 * std::pow(lip, 8) + 6.0 * c2() + 96.0; }

double TheoreticalBounds::c4() const { return lip * lip * (16.0 * dim + 4.0); }

double TheoreticalBounds::log_c0() const {
    const double l2 = lip * lip;
    return log_add(std::log(c3()) + c4(), std::log(2.0 * l2 * (l2 + 1.0) + 40.0 * l2));
}

double TheoreticalBounds::log_strong_bound(double n_steps) const {
    return log_c0() - strong_exponent() * std::log(block_size(n_steps));
}

double TheoreticalBounds::log_prokhorov_bound(double n_steps) const {
    return log_c0() / 3.0 - std::log(block_size(n_steps)) / (150.0 * dim);
}

double TheoreticalBounds::rho(double n_steps) const {
    const double q = block_size(n_steps);
    const double d = dim;
    const double shrink = std::pow(q, -1.0 / (24.0 * d));
    return 2.0 / (3.0 * d) * shrink * std::log(q) + 2.0 * std::sqrt(cf_constant()) * std::pow(q, -1.0 / 24.0) +
           4.0 * lip * std::sqrt(d) * shrink;
}

}  // namespace gameopt
