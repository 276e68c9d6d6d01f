#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gameopt/parallel.hpp"
#include "gameopt/payoff.hpp"
#include "gameopt/scheme.hpp"
#include "gameopt/tree.hpp"

namespace gameopt {

/// F and G evaluated at every tree node on its root-to-node prefix.
struct NodePayoffs {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Evaluates the payoff pair on every node; failures are rethrown with the
/// node address attached. Throws InvalidInput when the tree was merged on a
/// statistic the payoff does not declare.
NodePayoffs evaluate_payoffs(const ScenarioTree& tree, const PayoffPair& payoffs, int jobs = 1);

/// Result of the Dynkin backward recursion.
struct GameValueReport {
    double value = 0.0;
    std::vector<double> node_values;
    std::vector<double> lower;  // F at each node
    std::vector<double> upper;  // G at each node
    /// Nodes where V = G (cancellation region) and V = F (exercise region).
    std::vector<std::uint8_t> minimizer_stop;
    std::vector<std::uint8_t> maximizer_stop;

    int steps = 0;
    std::size_t branching = 0;
    bool recombined = false;
    std::string model_id;
    std::string law_id;
    std::string payoff_id;
    double wall_seconds = 0.0;
};

/// V_N = V_{N0} from V_{NN} = F_1 and
/// V_{Nn} = min(G_{n/N}, max(F_{n/N}, E[V_{N,n+1} | node])),
/// the conditional expectation being the probability-weighted child average.
/// Levels are processed in parallel over `jobs` threads.
GameValueReport backward_value(const ScenarioTree& tree, const PayoffPair& payoffs, int jobs = 1);

/// Stopping time on a tree: the first node along a path whose flag is set,
/// or the terminal time when no flag is met.
struct StoppingRule {
    std::vector<std::uint8_t> stop;
};

struct StrategyPair {
    StoppingRule minimizer;  // sigma*: first node with V = G
    StoppingRule maximizer;  // tau*:   first node with V = F
};

StrategyPair extract_strategies(const ScenarioTree& tree, const GameValueReport& report);

/// Exact E R_N(sigma/N, tau/N) with R_N(s, t) = G_s 1{s<t} + F_t 1{t<=s}.
double expected_payoff(const ScenarioTree& tree, const NodePayoffs& payoffs, const StoppingRule& minimizer,
                       const StoppingRule& maximizer);

/// Enumerates every stopping time of a (non-recombined) tree, as stop flags.
/// Throws InfeasibleError when more than `max_rules` exist.
std::vector<StoppingRule> enumerate_stopping_times(const ScenarioTree& tree, std::size_t max_rules);

/// Number of stopping times of the full m-ary tree of depth N (+inf on overflow).
double stopping_time_count(std::size_t branching, int depth) noexcept;

struct BruteForceResult {
    double inf_sup = 0.0;
    double sup_inf = 0.0;
    std::size_t stopping_times = 0;
};

/// Exact inf over minimizer stopping times of sup over maximizer stopping
/// times of E R_N, and the reversed order, by exhaustive enumeration.
/// `pair_budget` bounds the number of (sigma, tau) pairs evaluated.
BruteForceResult brute_force_value(const ScenarioTree& tree, const PayoffPair& payoffs,
                                   std::size_t pair_budget = 4'000'000);

/// Game value when both players may stop only at block times n_k.
double coarse_value(const ScenarioTree& tree, const PayoffPair& payoffs, const BlockPartition& partition);

/// Single-player optimal stopping value of F (sup over stopping times).
double american_value(const ScenarioTree& tree, const PayoffPair& payoffs);

/// E F_1: the value with no early decisions.
double european_value(const ScenarioTree& tree, const PayoffPair& payoffs);

/// Adapted stopping rule for simulation: decides from the path prefix and,
/// for finitely supported laws, the atom indices drawn so far.
using StopRule = std::function<bool(const PathView&, std::span<const std::uint32_t>)>;

/// Wraps a tree stopping rule; paths must be simulated from the model and
/// law the tree was built from.
StopRule tree_rule(const ScenarioTree& tree, StoppingRule rule);

/// Monte Carlo estimate of E R_N(sigma/N, tau/N) over `reps` independent
/// paths (replication r uses stream r), with its standard error.
Estimate mc_payoff(const DiffusionModel& model, const InnovationLaw& law, const PayoffPair& payoffs,
                   const StopRule& minimizer, const StopRule& maximizer, int n_steps, std::size_t reps,
                   std::uint64_t seed, int jobs = 1);

}  // namespace gameopt
