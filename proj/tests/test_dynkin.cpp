#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "gameopt/bounds.hpp"
#include "gameopt/dynkin.hpp"
#include "gameopt/report_io.hpp"
#include "support.hpp"

using namespace gameopt;
using namespace gameopt::testing;

namespace {

const InnovationLaw kRademacher = InnovationLaw::rademacher(1);

PayoffPair offset_payoff(PayoffPair base, double lower_shift, double upper_shift) {
    auto lo = base.lower;
    auto up = base.upper;
    base.lower = [lo, lower_shift](const PathView& v) { return lo(v) + (v.time() < 1.0 ? lower_shift : 0.0); };
    base.upper = [lo, up, upper_shift](const PathView& v) {
        return v.time() < 1.0 ? up(v) + upper_shift : lo(v);
    };
    return base;
}

}  // namespace

TEST(ScenarioTree, BinomialCounts) {
    const auto m = constant_model(1.0, 0.0);
    EXPECT_EQ(build_tree(m, kRademacher, 3).size(), 15u);
    TreeOptions opt;
    opt.recombine = true;
    opt.statistic = SufficientStatistic::state;
    EXPECT_EQ(build_tree(m, kRademacher, 3, opt).size(), 10u);
}

TEST(ScenarioTree, StateDependentStatesAreDistinct) {
    const auto tree = build_tree(model_preset("tanh-1d"), kRademacher, 3);
    ASSERT_EQ(tree.size(), 15u);
    std::set<double> leaves;
    for (std::size_t v = tree.level_begin(3); v < tree.level_end(3); ++v) leaves.insert(tree.state(v, 0));
    EXPECT_EQ(leaves.size(), 8u);
}

TEST(ScenarioTree, CapIsEnforcedWithRequiredSize) {
    try {
        build_tree(constant_model(1.0, 0.0), kRademacher, 25);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.required(), std::pow(2.0, 26) - 1.0);
    }
    EXPECT_EQ(full_tree_size(2, 3), 15.0);
}

TEST(ScenarioTree, RecombinationNeedsAStatistic) {
    TreeOptions opt;
    opt.recombine = true;
    EXPECT_THROW(build_tree(constant_model(1.0, 0.0), kRademacher, 3, opt), InvalidInput);
    EXPECT_THROW(build_tree(constant_model(1.0, 0.0), InnovationLaw::gaussian(1), 3), UnsupportedLaw);
}

TEST(ScenarioTree, MergedTreeRefusesPathDependentPayoff) {
    TreeOptions opt;
    opt.recombine = true;
    opt.statistic = SufficientStatistic::state;
    const auto tree = build_tree(model_preset("gbm-1d"), kRademacher, 4, opt);
    PayoffSpec spec;
    spec.kind = "asian-put";
    EXPECT_THROW(backward_value(tree, make_payoff(spec)), InvalidInput);
}

TEST(BackwardValue, ConstantPayoffIsAFixedPoint) {
    PayoffSpec spec;
    spec.kind = "constant";
    spec.constant = 0.37;
    const auto tree = build_tree(model_preset("sine-1d"), kRademacher, 5);
    EXPECT_EQ(backward_value(tree, make_payoff(spec)).value, 0.37);
}

TEST(BackwardValue, DeterministicHandRecursion) {
    const auto tree = build_tree(constant_model(0.0, 0.0), kRademacher, 2);
    const double f[] = {0.0, 1.0, 2.0};
    const double g[] = {3.0, 3.0, 2.0};
    const auto report = backward_value(tree, time_payoff([&](int n) { return f[n]; }, [&](int n) { return g[n]; }));
    EXPECT_EQ(report.value, 2.0);
    for (double v : report.node_values) EXPECT_EQ(v, 2.0);
}

TEST(BackwardValue, MatchesBruteForceOnSmallTree) {
    PayoffSpec spec;
    spec.strike = 1.2;
    spec.penalty = 0.2;
    const auto payoffs = make_payoff(spec);
    const auto tree = build_tree(constant_model(1.0, 0.0), kRademacher, 3);
    const auto report = backward_value(tree, payoffs);
    const auto brute = brute_force_value(tree, payoffs);
    EXPECT_NEAR(report.value, brute.inf_sup, 1e-12);
    EXPECT_NEAR(report.value, brute.sup_inf, 1e-12);
    EXPECT_EQ(brute.stopping_times, 26u);
}

TEST(BackwardValue, RandomInstancesMatchBruteForce) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 12; ++i) {
        const auto inst = random_instance(rng, 1 + i % 4);
        const auto tree = build_tree(inst.model, kRademacher, inst.steps);
        const double v = backward_value(tree, inst.payoffs).value;
        const auto brute = brute_force_value(tree, inst.payoffs);
        EXPECT_NEAR(v, brute.inf_sup, 1e-12) << inst.label;
        EXPECT_NEAR(v, brute.sup_inf, 1e-12) << inst.label;
    }
}

TEST(BackwardValue, SandwichHoldsAtEveryNode) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 8; ++i) {
        const auto inst = random_instance(rng, 6);
        const auto tree = build_tree(inst.model, kRademacher, inst.steps);
        const auto report = backward_value(tree, inst.payoffs);
        for (std::size_t v = 0; v < tree.size(); ++v) {
            ASSERT_LE(report.lower[v], report.node_values[v]);
            ASSERT_LE(report.node_values[v], report.upper[v]);
        }
        EXPECT_TRUE(audit_sandwich(tree, report).holds());
    }
}

TEST(BackwardValue, MonotoneInBothPayoffs) {
    PayoffSpec spec;
    spec.strike = 1.1;
    spec.penalty = 0.04;
    const auto base = make_payoff(spec);
    const auto tree = build_tree(model_preset("tanh-1d"), kRademacher, 8);
    const double v = backward_value(tree, base).value;
    EXPECT_GE(backward_value(tree, offset_payoff(base, 0.0, 0.05)).value, v);
    EXPECT_GE(backward_value(tree, offset_payoff(base, 0.02, 0.02)).value, v);
    EXPECT_LE(backward_value(tree, offset_payoff(base, -0.02, -0.02)).value, v);
}

TEST(BackwardValue, WorkerCountDoesNotChangeResults) {
    PayoffSpec spec;
    spec.kind = "lookback-put";
    spec.penalty = 0.1;
    const auto tree = build_tree(model_preset("sine-1d"), kRademacher, 12);
    const auto a = backward_value(tree, make_payoff(spec), 1);
    const auto b = backward_value(tree, make_payoff(spec), 4);
    EXPECT_EQ(a.node_values, b.node_values);
    EXPECT_EQ(a.minimizer_stop, b.minimizer_stop);
    EXPECT_EQ(a.maximizer_stop, b.maximizer_stop);
}

TEST(BackwardValue, EqualPayoffsGiveTheInitialPayoff) {
    PayoffSpec spec;
    spec.penalty = 0.0;
    spec.strike = 1.3;
    const auto tree = build_tree(model_preset("gbm-1d"), kRademacher, 6);
    const auto report = backward_value(tree, make_payoff(spec));
    EXPECT_DOUBLE_EQ(report.value, 0.3);
}

TEST(BackwardValue, HugePenaltyGivesTheAmericanValue) {
    PayoffSpec spec;
    spec.kind = "american-put";
    spec.strike = 1.05;
    const auto m = model_preset("gbm-1d");
    TreeOptions opt;
    opt.recombine = true;
    opt.statistic = SufficientStatistic::state;
    const auto tree = build_tree(m, kRademacher, 30, opt);
    const auto pair = make_payoff(spec);
    const double oracle = binomial_american_put(0.0, 0.2, -0.02, 30, 1.05);
    EXPECT_NEAR(backward_value(tree, pair).value, oracle, 1e-12);
    EXPECT_NEAR(american_value(tree, pair), oracle, 1e-12);
}

TEST(BackwardValue, BracketedByCancellationAndAmericanValue) {
    PayoffSpec spec;
    spec.strike = 1.0;
    spec.penalty = 0.5;
    const auto tree = build_tree(model_preset("tanh-1d"), kRademacher, 10);
    const auto pair = make_payoff(spec);
    const double v = backward_value(tree, pair).value;
    // A penalty that never binds leaves the American value, which dominates E F_1.
    EXPECT_NEAR(v, american_value(tree, pair), 1e-12);
    EXPECT_LE(european_value(tree, pair), v);
}

TEST(Strategies, EqualPayoffsStopAtTheRoot) {
    PayoffSpec spec;
    spec.kind = "constant";
    spec.constant = 1.0;
    const auto tree = build_tree(model_preset("bm-1d"), kRademacher, 3);
    const auto s = extract_strategies(tree, backward_value(tree, make_payoff(spec)));
    EXPECT_TRUE(s.minimizer.stop[0]);
    EXPECT_TRUE(s.maximizer.stop[0]);
}

TEST(Strategies, HugeOffsetNeverCancelsEarly) {
    PayoffSpec spec;
    spec.penalty = 1e9;
    const auto tree = build_tree(model_preset("gbm-1d"), kRademacher, 5);
    const auto s = extract_strategies(tree, backward_value(tree, make_payoff(spec)));
    for (std::size_t v = 0; v < tree.size(); ++v) {
        if (!tree.is_leaf(v)) {
            EXPECT_FALSE(s.minimizer.stop[v]) << v;
        }
    }
}

TEST(Strategies, SaddleAgainstEveryOpponent) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 6; ++i) {
        const auto inst = random_instance(rng, 3);
        const auto tree = build_tree(inst.model, kRademacher, inst.steps);
        const auto report = backward_value(tree, inst.payoffs);
        const auto s = extract_strategies(tree, report);
        const NodePayoffs pay{report.lower, report.upper};
        const auto rules = enumerate_stopping_times(tree, 10000);
        ASSERT_EQ(rules.size(), 26u);
        for (const auto& opponent : rules) {
            EXPECT_LE(expected_payoff(tree, pay, s.minimizer, opponent), report.value + 1e-12) << inst.label;
            EXPECT_GE(expected_payoff(tree, pay, opponent, s.maximizer), report.value - 1e-12) << inst.label;
        }
        EXPECT_NEAR(expected_payoff(tree, pay, s.minimizer, s.maximizer), report.value, 1e-12);
    }
}

TEST(Strategies, ExpectedPayoffAgreesWithPathWalk) {
    std::mt19937_64 rng(3);
    const auto inst = random_instance(rng, 3);
    const auto tree = build_tree(inst.model, kRademacher, inst.steps);
    const auto pay = evaluate_payoffs(tree, inst.payoffs);
    const auto rules = enumerate_stopping_times(tree, 100);
    for (const auto& a : rules)
        for (const auto& b : rules)
            ASSERT_NEAR(expected_payoff(tree, pay, a, b), path_sum_payoff(tree, pay, a, b), 1e-14);
}

TEST(BruteForce, StoppingTimeCounts) {
    EXPECT_EQ(stopping_time_count(2, 0), 1.0);
    EXPECT_EQ(stopping_time_count(2, 1), 2.0);
    EXPECT_EQ(stopping_time_count(2, 2), 5.0);
    EXPECT_EQ(stopping_time_count(2, 3), 26.0);
    EXPECT_EQ(stopping_time_count(2, 4), 677.0);
    const auto tree = build_tree(model_preset("bm-1d"), kRademacher, 4);
    EXPECT_EQ(enumerate_stopping_times(tree, 1000).size(), 677u);
    EXPECT_THROW(enumerate_stopping_times(tree, 100), InfeasibleError);
}

TEST(BruteForce, ZeroStepTreePaysTheTerminalPayoff) {
    PayoffSpec spec;
    spec.strike = 1.4;
    const auto tree = build_tree(model_preset("gbm-1d"), kRademacher, 0);
    const auto brute = brute_force_value(tree, make_payoff(spec));
    EXPECT_DOUBLE_EQ(brute.inf_sup, 0.4);
    EXPECT_DOUBLE_EQ(brute.sup_inf, 0.4);
}

TEST(BruteForce, EqualPayoffsStopImmediately) {
    PayoffSpec spec;
    spec.penalty = 0.0;
    spec.strike = 1.2;
    const auto tree = build_tree(model_preset("tanh-1d"), kRademacher, 3);
    const auto brute = brute_force_value(tree, make_payoff(spec));
    EXPECT_DOUBLE_EQ(brute.inf_sup, 0.2);
    EXPECT_DOUBLE_EQ(brute.sup_inf, 0.2);
}

TEST(CoarseValue, UnitBlocksReproduceTheValue) {
    PayoffSpec spec;
    spec.penalty = 0.05;
    spec.strike = 1.1;
    const auto tree = build_tree(model_preset("tanh-1d"), kRademacher, 10);
    const auto pair = make_payoff(spec);
    EXPECT_EQ(coarse_value(tree, pair, block_partition(10)), backward_value(tree, pair).value);
}

TEST(CoarseValue, DeterministicTreeUsesOnlyBlockTimes) {
    const int n = 16;
    const auto tree = build_tree(constant_model(0.0, 0.0), kRademacher, n,
                                 TreeOptions{1'000'000, true, SufficientStatistic::state, 1e-10});
    auto f = [](int k) { return k == 3 ? 2.1 : 0.1 * k; };
    auto g = [](int k) { return k == 16 ? 1.6 : 2.0 + 0.05 * k; };
    const auto pair = time_payoff(f, g);
    // Backward min-max over the even times only.
    double v = f(n);
    for (int k = n - 2; k >= 0; k -= 2) v = std::min(g(k), std::max(f(k), v));
    EXPECT_EQ(coarse_value(tree, pair, block_partition(n)), v);
    EXPECT_GT(backward_value(tree, pair).value, v);
}

TEST(CoarseValue, WithinTheBlockBudget) {
    PayoffSpec spec;
    spec.penalty = 0.05;
    spec.strike = 1.1;
    const auto m = model_preset("sine-1d");
    const auto tree = build_tree(m, kRademacher, 16, tree_options_for(make_payoff(spec), false, 1'000'000));
    const auto pair = make_payoff(spec);
    const double gap = std::abs(backward_value(tree, pair).value - coarse_value(tree, pair, block_partition(16)));
    const TheoreticalBounds b{m.lip_bound, 1};
    EXPECT_LE(std::log(gap), b.log_coarse_game_budget(pair.reg_const, 0.1, 0.0, 16.0));
}

TEST(MonteCarlo, ConstantPayoffIsExact) {
    PayoffSpec spec;
    spec.kind = "constant";
    spec.constant = 2.5;
    const StopRule never = [](const PathView&, std::span<const std::uint32_t>) { return false; };
    const auto est = mc_payoff(model_preset("tanh-1d"), kRademacher, make_payoff(spec), never, never, 8, 100, 1);
    EXPECT_EQ(est.mean, 2.5);
    EXPECT_EQ(est.std_error, 0.0);
}

TEST(MonteCarlo, OptimalStrategiesReproduceTheValue) {
    PayoffSpec spec;
    spec.strike = 1.05;
    spec.penalty = 0.2;
    const auto m = model_preset("tanh-1d");
    const auto pair = make_payoff(spec);
    const auto tree = build_tree(m, kRademacher, 10);
    const auto report = backward_value(tree, pair);
    const auto s = extract_strategies(tree, report);
    const auto est = mc_payoff(m, kRademacher, pair, tree_rule(tree, s.minimizer), tree_rule(tree, s.maximizer), 10,
                               20000, 3, 4);
    EXPECT_GT(est.std_error, 0.0);
    EXPECT_LE(std::abs(est.mean - report.value), 4.0 * est.std_error);
}

TEST(MonteCarlo, StandardErrorScalesWithReplications) {
    PayoffSpec spec;
    spec.strike = 1.0;
    const auto m = model_preset("gbm-1d");
    const StopRule never = [](const PathView&, std::span<const std::uint32_t>) { return false; };
    const auto pair = make_payoff(spec);
    const auto a = mc_payoff(m, kRademacher, pair, never, never, 16, 20000, 9);
    const auto b = mc_payoff(m, kRademacher, pair, never, never, 16, 40000, 9);
    const double ratio = b.std_error / a.std_error;
    EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(MonteCarlo, WorkerCountDoesNotChangeTheEstimate) {
    PayoffSpec spec;
    const auto m = model_preset("sine-1d");
    const StopRule at_half = [](const PathView& v, std::span<const std::uint32_t>) { return v.time() >= 0.5; };
    const StopRule never = [](const PathView&, std::span<const std::uint32_t>) { return false; };
    const auto a = mc_payoff(m, kRademacher, make_payoff(spec), never, at_half, 8, 999, 4, 1);
    const auto b = mc_payoff(m, kRademacher, make_payoff(spec), never, at_half, 8, 999, 4, 3);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}
