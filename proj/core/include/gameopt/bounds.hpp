#pragma once

#include <string>

namespace gameopt {

/// Explicit constants of the chain's error and moment estimates, as pure
/// functions of (L, d). Quantities that overflow a double are exposed in
/// natural-log form; `log_*` members may return +inf.
struct TheoreticalBounds {
    double lip = 1.0;  // L
    int dim = 1;       // d

    /// Exponent of the characteristic-function estimate.
    static constexpr double kCfExponent = 1.0 / 6.0;

    /// C_1 = (3/2) L^6.
    double cf_constant() const;
    /// C_1 n^{-1/6}.
    double cf_bound(double n) const;

    /// 136 L^8, the constant of E sup |X_N - Xhat_N|^2 <= 136 L^8 N^{-1/2}.
    double coarse_constant() const;
    double coarse_bound(double n_steps) const;

    /// log D^X_M, D^X_M = 2d exp(d^4 L^4 / 2 + L + M^3 d^6 L^6 e^{M d^2 L^2} / 6).
    double log_dx(double m) const;
    /// D^X_M (may be +inf).
    double dx(double m) const;
    /// log D^X_{M,delta}, D^X_{M,delta} = 1 + (D^X_{2M/delta} D^X_{2M})^{1/2}.
    double log_dx_delta(double m, double delta) const;
    /// D^Xi_M = 2 exp(L + M L^2 d^2 / 2).
    double dxi(double m) const;

    /// log of D^X_M e^{M|x0|} N^delta, the bound on E exp(M max_n |X_N(n/N)|).
    double log_exp_moment_bound(double m, double delta, double x0_norm, double n_steps) const;

    /// log of D^X_{K,delta} K e^{K|x0|} N^{delta - 1/4} (1 + L + L^2), the
    /// bound on |V_N - V_N^Delta|.
    double log_coarse_game_budget(double k_reg, double delta, double x0_norm, double n_steps) const;
    /// log of 24 sqrt(D^X_{4K,delta}) e^{K|x0|} L^4 N^{(delta - 1/2)/2}.
    double log_frozen_game_budget(double k_reg, double delta, double x0_norm, double n_steps) const;

    /// N_0 = ((10^8 d)^{24 d} + 1)^4 in decimal, computed exactly.
    std::string n0_decimal() const;
    /// log10 N_0.
    double log10_n0() const;

    /// Strong-error exponent 1/(50 d) applied to [N^{1/4}].
    double strong_exponent() const;
    /// Game-value exponent delta - 1/(100 d) applied to [N^{1/4}].
    double value_exponent(double delta) const;

    /// C_2 of the block-coupling estimate; its supremum over N is taken
    /// exactly on N <= 10^6 and in closed form beyond.
    double c2() const;
    /// C_3 = 408 L^8 + 6 C_2 + 96.
    double c3() const;
    /// C_4 = L^2 (16 d + 4).
    double c4() const;
    /// log C_0, C_0 = C_3 e^{C_4} + 2 L^2 (L^2 + 1) + 40 L^2.
    double log_c0() const;
    /// log of C_0 [N^{1/4}]^{-1/(50 d)}.
    double log_strong_bound(double n_steps) const;
    /// log of C_0^{1/3} [N^{1/4}]^{-1/(150 d)}.
    double log_prokhorov_bound(double n_steps) const;
    /// rho_k for block size [N^{1/4}].
    double rho(double n_steps) const;
};

}  // namespace gameopt
