#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gameopt/path.hpp"
#include "gameopt/validation.hpp"

namespace gameopt {

/// Path functional evaluated at time view.time() on the prefix `view`.
using PathFunctional = std::function<double(const PathView&)>;

/// What a payoff needs to know about a path prefix. Scenario trees may merge
/// nodes that agree on the declared statistic.
enum class SufficientStatistic {
    none,         // genuinely path dependent
    state,        // current state only
    running_max,  // current state and running maximum of the basket price
};

const char* to_string(SufficientStatistic s) noexcept;
SufficientStatistic sufficient_statistic_from_string(const std::string& s);

/// Lower (exercise) and upper (cancellation) payoffs F_t <= G_t with
/// G_1 = F_1, and the regularity constant K they are declared to satisfy.
struct PayoffPair {
    std::string id = "custom";
    PathFunctional lower;
    PathFunctional upper;
    double reg_const = 1.0;
    SufficientStatistic statistic = SufficientStatistic::none;
};

/// How the cancellation penalty evolves before maturity.
enum class PenaltyProfile {
    flat,    // G = F + delta on [0, 1), jump to F at 1
    linear,  // G = F + delta (1 - t), continuous in t
};

/// Parameters for the built-in payoff catalog.
struct PayoffSpec {
    std::string kind = "israeli-put";  // constant, israeli-put, israeli-call, american-put,
                                       // lookback-put, asian-put
    double strike = 1.0;
    double penalty = 0.05;
    PenaltyProfile profile = PenaltyProfile::flat;
    double constant = 0.0;

    friend bool operator==(const PayoffSpec&, const PayoffSpec&) = default;
};

/// Basket price S(x) = mean_i exp(x_i).
double basket_price(const PathView& view, int k);

/// Builds a catalog payoff. Exercise payoffs act on the basket price:
///   put          F_t = (strike - S_t)^+
///   call         F_t = (S_t - strike)^+
///   lookback-put F_t = max_{u<=t} S_u - S_t
///   asian-put    F_t = (strike - A_t)^+, A_t = (S_0 + int_0^t S_u du) / (1 + t)
/// and G_t = F_t + penalty * profile(t) with G_1 = F_1. "american-put" is the
/// put with a penalty of 1e6, which makes cancellation never optimal.
PayoffPair make_payoff(const PayoffSpec& spec);

/// Checks G >= F at every sampled (t, path), G_1 = F_1 to 1e-12, and the
/// spatial and temporal regularity inequalities with the declared K on
/// sampled path pairs and time pairs. Witnesses name the first violation.
ValidationReport validate_payoffs(const PayoffPair& pair, const std::vector<DiscretePath>& paths);

}  // namespace gameopt
