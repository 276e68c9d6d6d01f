#include "gameopt/dynkin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gameopt {

namespace {

std::string count_text(double count) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6g", count);
    return buffer;
}

std::string node_address(const ScenarioTree& tree, std::size_t v) {
    std::string atoms;
    std::size_t u = v;
    while (tree.parent(u) != ScenarioTree::kNoParent) {
        const std::size_t p = tree.parent(u);
        for (std::size_t a = 0; a < tree.branching(); ++a) {
            if (tree.child(p, a) == u) {
                atoms.insert(0, std::to_string(a) + (atoms.empty() ? "" : "."));
                break;
            }
        }
        u = p;
    }
    return "node " + std::to_string(v) + " (level " + std::to_string(tree.level(v)) + ", atoms [" + atoms + "])";
}

bool statistic_compatible(SufficientStatistic merged, SufficientStatistic declared) {
    switch (merged) {
        case SufficientStatistic::none: return true;
        case SufficientStatistic::state: return declared == SufficientStatistic::state;
        case SufficientStatistic::running_max:
            return declared == SufficientStatistic::state || declared == SufficientStatistic::running_max;
    }
    return false;
}

double child_average(const ScenarioTree& tree, const std::vector<double>& values, std::size_t v) {
    const auto& p = tree.probabilities();
    double c = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) c += p[a] * values[tree.child(v, a)];
    return c;
}

/// Generic backward pass: leaves take F; internal nodes take
/// combine(level, v, continuation).
template <typename Combine>
std::vector<double> recurse(const ScenarioTree& tree, const NodePayoffs& pay, Combine&& combine, int jobs = 1) {
    std::vector<double> values(tree.size(), 0.0);
    const int depth = tree.depth();
    for (std::size_t v = tree.level_begin(depth); v < tree.level_end(depth); ++v) values[v] = pay.lower[v];
    for (int n = depth - 1; n >= 0; --n) {
        const std::size_t begin = tree.level_begin(n);
        parallel_for(tree.level_end(n) - begin, jobs, [&](std::size_t i) {
            const std::size_t v = begin + i;
            values[v] = combine(n, v, child_average(tree, values, v));
        });
    }
    return values;
}

double expected_payoff_with(const ScenarioTree& tree, const NodePayoffs& pay, const std::uint8_t* min_stop,
                            const std::uint8_t* max_stop, std::vector<double>& reach) {
    std::fill(reach.begin(), reach.end(), 0.0);
    reach[0] = 1.0;
    const auto& p = tree.probabilities();
    const std::size_t m = p.size();
    double total = 0.0;
    for (std::size_t v = 0; v < tree.size(); ++v) {
        const double mass = reach[v];
        if (mass == 0.0) continue;
        if (max_stop[v] || tree.is_leaf(v)) {
            total += mass * pay.lower[v];
        } else if (min_stop[v]) {
            total += mass * pay.upper[v];
        } else {
            for (std::size_t a = 0; a < m; ++a) reach[tree.child(v, a)] += mass * p[a];
        }
    }
    return total;
}

}  // namespace

NodePayoffs evaluate_payoffs(const ScenarioTree& tree, const PayoffPair& payoffs, int jobs) {
    if (!statistic_compatible(tree.merged_on(), payoffs.statistic))
        throw InvalidInput(std::string("tree merged on '") + to_string(tree.merged_on()) + "' but payoff '" +
                           payoffs.id + "' declares '" + to_string(payoffs.statistic) + "'");
    NodePayoffs out;
    out.lower.resize(tree.size());
    out.upper.resize(tree.size());
    const std::size_t workers = static_cast<std::size_t>(std::max(jobs, 1));
    const std::size_t count = tree.size();
    parallel_for(workers, jobs, [&](std::size_t w) {
        std::vector<double> buffer;
        for (std::size_t v = count * w / workers; v < count * (w + 1) / workers; ++v) {
            tree.path_to(v, buffer);
            const PathView view(buffer, tree.dim(), tree.depth());
            try {
                out.lower[v] = payoffs.lower(view);
                out.upper[v] = payoffs.upper(view);
            } catch (const std::exception& e) {
                throw Error("payoff '" + payoffs.id + "' failed at " + node_address(tree, v) + ": " + e.what());
            }
            if (!std::isfinite(out.lower[v]) || !std::isfinite(out.upper[v]))
                throw Error("payoff '" + payoffs.id + "' is not finite at " + node_address(tree, v));
        }
    });
    return out;
}

GameValueReport backward_value(const ScenarioTree& tree, const PayoffPair& payoffs, int jobs) {
    const auto start = std::chrono::steady_clock::now();
    NodePayoffs pay = evaluate_payoffs(tree, payoffs, jobs);
    for (std::size_t v = 0; v < tree.size(); ++v) {
        if (pay.lower[v] > pay.upper[v])
            throw InvalidInput("payoff '" + payoffs.id + "' has F > G at " + node_address(tree, v));
        if (tree.is_leaf(v) &&
            std::abs(pay.upper[v] - pay.lower[v]) > 1e-12 * std::max(1.0, std::abs(pay.lower[v])))
            throw InvalidInput("payoff '" + payoffs.id + "' has G_1 != F_1 at " + node_address(tree, v));
    }

    GameValueReport report;
    report.node_values = recurse(
        tree, pay,
        [&](int, std::size_t v, double cont) { return std::min(pay.upper[v], std::max(pay.lower[v], cont)); },
        jobs);
    report.value = report.node_values[0];
    report.minimizer_stop.resize(tree.size());
    report.maximizer_stop.resize(tree.size());
    for (std::size_t v = 0; v < tree.size(); ++v) {
        report.minimizer_stop[v] = report.node_values[v] == pay.upper[v];
        report.maximizer_stop[v] = report.node_values[v] == pay.lower[v];
    }
    report.lower = std::move(pay.lower);
    report.upper = std::move(pay.upper);
    report.steps = tree.depth();
    report.branching = tree.branching();
    report.recombined = tree.recombined();
    report.payoff_id = payoffs.id;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

StrategyPair extract_strategies(const ScenarioTree& tree, const GameValueReport& report) {
    if (report.node_values.size() != tree.size())
        throw InvalidInput("extract_strategies: report was not produced from this tree");
    return {StoppingRule{report.minimizer_stop}, StoppingRule{report.maximizer_stop}};
}

double expected_payoff(const ScenarioTree& tree, const NodePayoffs& payoffs, const StoppingRule& minimizer,
                       const StoppingRule& maximizer) {
    if (minimizer.stop.size() != tree.size() || maximizer.stop.size() != tree.size())
        throw InvalidInput("expected_payoff: stopping rule size differs from tree size");
    std::vector<double> reach(tree.size());
    return expected_payoff_with(tree, payoffs, minimizer.stop.data(), maximizer.stop.data(), reach);
}

double stopping_time_count(std::size_t branching, int depth) noexcept {
    double count = 1.0;
    for (int n = 1; n <= depth; ++n) {
        count = 1.0 + std::pow(count, static_cast<double>(branching));
        if (!std::isfinite(count)) return std::numeric_limits<double>::infinity();
    }
    return count;
}

std::vector<StoppingRule> enumerate_stopping_times(const ScenarioTree& tree, std::size_t max_rules) {
    if (tree.recombined())
        throw InvalidInput("stopping-time enumeration needs a non-recombined tree");
    const double count = stopping_time_count(tree.branching(), tree.depth());
    if (count > static_cast<double>(max_rules))
        throw InfeasibleError("tree has " + count_text(count) + " stopping times, budget is " +
                                  std::to_string(max_rules),
                              count);

    // Stop sets of the subtree rooted at v: {v} or a product of the children's sets.
    using StopSet = std::vector<std::size_t>;
    auto sets_of = [&](auto&& self, std::size_t v) -> std::vector<StopSet> {
        std::vector<StopSet> out;
        if (tree.is_leaf(v)) {
            out.emplace_back();
            return out;
        }
        out.push_back({v});
        std::vector<StopSet> combined{StopSet{}};
        for (std::size_t a = 0; a < tree.branching(); ++a) {
            const auto child_sets = self(self, tree.child(v, a));
            std::vector<StopSet> next;
            next.reserve(combined.size() * child_sets.size());
            for (const auto& left : combined) {
                for (const auto& right : child_sets) {
                    StopSet merged = left;
                    merged.insert(merged.end(), right.begin(), right.end());
                    next.push_back(std::move(merged));
                }
            }
            combined = std::move(next);
        }
        for (auto& s : combined) out.push_back(std::move(s));
        return out;
    };

    std::vector<StoppingRule> rules;
    for (const auto& set : sets_of(sets_of, 0)) {
        StoppingRule rule{std::vector<std::uint8_t>(tree.size(), 0)};
        for (std::size_t v : set) rule.stop[v] = 1;
        rules.push_back(std::move(rule));
    }
    return rules;
}

BruteForceResult brute_force_value(const ScenarioTree& tree, const PayoffPair& payoffs, std::size_t pair_budget) {
    const double count = stopping_time_count(tree.branching(), tree.depth());
    if (count * count > static_cast<double>(pair_budget))
        throw InfeasibleError("brute force needs " + count_text(count * count) +
                                  " stopping-time pairs, budget is " + std::to_string(pair_budget),
                              count * count);
    const NodePayoffs pay = evaluate_payoffs(tree, payoffs);
    const auto rules = enumerate_stopping_times(tree, pair_budget);
    const std::size_t n = rules.size();

    std::vector<double> reach(tree.size());
    std::vector<double> column_min(n, std::numeric_limits<double>::infinity());
    double inf_sup = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double r = expected_payoff_with(tree, pay, rules[i].stop.data(), rules[j].stop.data(), reach);
            row_max = std::max(row_max, r);
            column_min[j] = std::min(column_min[j], r);
        }
        inf_sup = std::min(inf_sup, row_max);
    }
    BruteForceResult result;
    result.inf_sup = inf_sup;
    result.sup_inf = *std::max_element(column_min.begin(), column_min.end());
    result.stopping_times = n;
    return result;
}

double coarse_value(const ScenarioTree& tree, const PayoffPair& payoffs, const BlockPartition& partition) {
    if (partition.n_steps != tree.depth())
        throw InvalidInput("coarse_value: partition built for N = " + std::to_string(partition.n_steps) +
                           ", tree depth is " + std::to_string(tree.depth()));
    const NodePayoffs pay = evaluate_payoffs(tree, payoffs);
    const auto values = recurse(tree, pay, [&](int n, std::size_t v, double cont) {
        if (!partition.is_block_time(n)) return cont;
        return std::min(pay.upper[v], std::max(pay.lower[v], cont));
    });
    return values[0];
}

double american_value(const ScenarioTree& tree, const PayoffPair& payoffs) {
    const NodePayoffs pay = evaluate_payoffs(tree, payoffs);
    return recurse(tree, pay, [&](int, std::size_t v, double cont) { return std::max(pay.lower[v], cont); })[0];
}

double european_value(const ScenarioTree& tree, const PayoffPair& payoffs) {
    const NodePayoffs pay = evaluate_payoffs(tree, payoffs);
    return recurse(tree, pay, [](int, std::size_t, double cont) { return cont; })[0];
}

StopRule tree_rule(const ScenarioTree& tree, StoppingRule rule) {
    return [&tree, rule = std::move(rule)](const PathView& view, std::span<const std::uint32_t> atoms) {
        const int n = view.index();
        if (n > tree.depth() || atoms.size() < static_cast<std::size_t>(n))
            throw InvalidInput("tree_rule: path is not addressable in the tree");
        return rule.stop[tree.follow(atoms.data(), n)] != 0;
    };
}

Estimate mc_payoff(const DiffusionModel& model, const InnovationLaw& law, const PayoffPair& payoffs,
                   const StopRule& minimizer, const StopRule& maximizer, int n_steps, std::size_t reps,
                   std::uint64_t seed, int jobs) {
    if (reps == 0) throw InvalidInput("mc_payoff needs at least one replication");
    std::vector<double> samples(reps);
    parallel_for(reps, jobs, [&](std::size_t r) {
        const DiscretePath path = simulate_path(model, law, n_steps, seed, r);
        const std::span<const std::uint32_t> atoms(path.atoms);
        for (int n = 0; n <= n_steps; ++n) {
            const PathView view = path.view(n);
            const auto drawn = atoms.empty() ? atoms : atoms.first(static_cast<std::size_t>(n));
            if (n == n_steps || maximizer(view, drawn)) {
                samples[r] = payoffs.lower(view);
                return;
            }
            if (minimizer(view, drawn)) {
                samples[r] = payoffs.upper(view);
                return;
            }
        }
    });
    return summarize(samples);
}

}  // namespace gameopt
