#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gameopt/report_io.hpp"
#include "gameopt/rng.hpp"
#include "gameopt/scheme.hpp"
#include "support.hpp"

using namespace gameopt;
using gameopt::testing::constant_model;
using gameopt::testing::scalar_model;

namespace {

Vector v1(double x) {
    Vector v(1);
    v << x;
    return v;
}

DiscretePath with_innovations(const DiffusionModel& m, const std::vector<double>& xi) {
    DiscretePath p;
    p.dim = 1;
    p.steps = static_cast<int>(xi.size());
    p.innovations = xi;
    p.states.assign(xi.size() + 1, 0.0);
    return replay_path(m, p);
}

}  // namespace

TEST(Philox, KnownAnswerForZeroInput) {
    const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(RandomStream, AddressesAreIndependent) {
    RandomStream a(1, 0), b(1, 1), c(1, 0, Substream::bridge), d(1, 0);
    const auto x = a.next_u32();
    EXPECT_NE(x, b.next_u32());
    EXPECT_NE(x, c.next_u32());
    EXPECT_EQ(x, d.next_u32());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Step, ZeroCoefficientsAreTheIdentity) {
    const auto m = constant_model(0.0, 0.0);
    EXPECT_EQ(step(v1(0.7), v1(1.0), m, 9)[0], 0.7);
}

TEST(Step, HandExamples) {
    EXPECT_DOUBLE_EQ(step(v1(0.0), v1(1.0), constant_model(1.0, 0.0), 4)[0], 0.5);
    const auto m = scalar_model([](double) { return 2.0; }, [](double) { return 1.0; }, 2.0, 0.0, true);
    EXPECT_NEAR(step(v1(1.0), v1(-1.0), m, 100)[0], 0.81, 1e-15);
}

TEST(SimulatePath, ZeroCoefficientsStayAtStart) {
    const auto path = simulate_path(constant_model(0.0, 0.0, 0.3), InnovationLaw::rademacher(1), 12, 4);
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(path.state(n)[0], 0.3);
}

TEST(SimulatePath, HandRecursion) {
    auto m = constant_model(1.0, 0.0, 0.25);
    const auto path = with_innovations(m, {1.0, -1.0});
    EXPECT_EQ(path.state(0)[0], 0.25);
    EXPECT_DOUBLE_EQ(path.state(1)[0], 0.25 + 1.0 / std::sqrt(2.0));
    EXPECT_NEAR(path.state(2)[0], 0.25, 1e-15);
}

TEST(SimulatePath, MomentsOfTheTerminalState) {
    const auto m = constant_model(0.3, 0.1, 0.2);
    const auto law = InnovationLaw::rademacher(1);
    const int reps = 100000;
    std::vector<double> x(reps);
    for (int r = 0; r < reps; ++r) x[r] = simulate_path(m, law, 256, 11, static_cast<std::uint64_t>(r)).state(256)[0];
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= reps;
    double var = 0.0, m4 = 0.0;
    for (double v : x) {
        var += (v - mean) * (v - mean);
        m4 += std::pow(v - mean, 4);
    }
    var /= reps - 1;
    m4 /= reps;
    const double se_mean = std::sqrt(var / reps);
    const double se_var = std::sqrt((m4 - var * var) / reps);
    EXPECT_LE(std::abs(mean - 0.3), 4.0 * se_mean);
    EXPECT_LE(std::abs(var - 0.09), 4.0 * se_var);
}

TEST(SimulatePath, ZeroDriftMartingaleCheck) {
    const auto m = model_preset("tanh-1d");
    const auto law = InnovationLaw::trinomial(1);
    const int reps = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double x = simulate_path(m, law, 64, 8, static_cast<std::uint64_t>(r)).state(64)[0];
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum_sq / reps - mean * mean);
    EXPECT_LE(std::abs(mean), 4.0 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST(SimulatePath, ReplayIsDeterministic) {
    const auto m = model_preset("sine-1d");
    const auto law = InnovationLaw::trinomial(1);
    const auto a = simulate_path(m, law, 50, 99, 3);
    const auto b = simulate_path(m, law, 50, 99, 3);
    EXPECT_EQ(a, b);
    EXPECT_EQ(replay_path(m, a), a);
    EXPECT_NE(simulate_path(m, law, 50, 99, 4).states, a.states);
}

TEST(SimulatePath, TransitionsFollowTheScheme) {
    const auto m = model_preset("sine-1d");
    const auto path = simulate_path(m, InnovationLaw::rademacher(1), 40, 2, 0);
    for (int n = 1; n <= 40; ++n) {
        const double x = path.state(n - 1)[0];
        const double xi = path.innovation(n)[0];
        const double diffusion = (1.0 + 0.5 * std::sin(x)) * xi / std::sqrt(40.0);
        const double drift = 0.25 * std::cos(x) / 40.0;
        const double expected = x + diffusion + drift;
        // Rounding is relative to the largest term or partial sum, not to the result.
        const double scale =
            std::max({std::abs(x), std::abs(diffusion), std::abs(drift), std::abs(x + diffusion), std::abs(expected)});
        const double ulp = std::nextafter(scale, std::numeric_limits<double>::infinity()) - scale;
        EXPECT_LE(std::abs(path.state(n)[0] - expected), 4.0 * ulp) << n;
    }
}

TEST(SimulatePath, PiecewiseConstantExtension) {
    const auto path = simulate_path(model_preset("bm-1d"), InnovationLaw::rademacher(1), 4, 1);
    EXPECT_EQ(path.value_at(0.3)[0], path.state(1)[0]);
    EXPECT_EQ(path.value_at(0.25)[0], path.state(1)[0]);
    EXPECT_EQ(path.value_at(0.99)[0], path.state(3)[0]);
    EXPECT_EQ(path.value_at(1.0)[0], path.state(4)[0]);
}

TEST(BlockPartition, SixteenSteps) {
    const auto p = block_partition(16);
    EXPECT_EQ(p.block, 2);
    EXPECT_EQ(p.full_blocks, 8);
    EXPECT_EQ(p.k_max, 8);
    EXPECT_FALSE(p.has_tail);
    EXPECT_EQ(p.delta(), 0.125);
    const std::vector<int> expected{0, 2, 4, 6, 8, 10, 12, 14, 16};
    EXPECT_EQ(p.block_times(), expected);
}

TEST(BlockPartition, SeventeenStepsHasATail) {
    const auto p = block_partition(17);
    EXPECT_EQ(p.block, 2);
    EXPECT_EQ(p.full_blocks, 8);
    EXPECT_EQ(p.k_max, 9);
    EXPECT_TRUE(p.has_tail);
    EXPECT_EQ(p.end(8), 16);
    EXPECT_EQ(p.end(9), 17);
}

TEST(BlockPartition, FourthRootIsExact) {
    EXPECT_EQ(block_partition(10).block, 1);
    EXPECT_EQ(integer_fourth_root(15), 1);
    EXPECT_EQ(integer_fourth_root(16), 2);
    EXPECT_EQ(integer_fourth_root(80), 2);
    EXPECT_EQ(integer_fourth_root(81), 3);
    EXPECT_EQ(integer_fourth_root(4096), 8);
    EXPECT_EQ(integer_fourth_root(9999), 9);
    EXPECT_EQ(integer_fourth_root(10000), 10);
}

TEST(CoarsePath, UnitBlocksReproduceTheChain) {
    const auto m = model_preset("bump-1d");
    const auto path = simulate_path(m, InnovationLaw::rademacher(1), 10, 3);
    EXPECT_EQ(coarse_path(path, m, block_partition(10)).states, path.states);
}

TEST(CoarsePath, ConstantCoefficientsReproduceTheChain) {
    const auto m = model_preset("gbm-1d");
    const auto path = simulate_path(m, InnovationLaw::rademacher(1), 300, 3);
    const auto coarse = coarse_path(path, m, block_partition(300));
    for (std::size_t i = 0; i < path.states.size(); ++i) EXPECT_NEAR(coarse.states[i], path.states[i], 1e-13);
}

TEST(CoarsePath, FreezesCoefficientsAtBlockStarts) {
    const auto m = model_preset("bump-1d");
    const auto path = simulate_path(m, InnovationLaw::rademacher(1), 16, 6);
    const auto coarse = coarse_path(path, m, block_partition(16));
    double x = path.state(0)[0];
    for (int k = 0; k < 8; ++k) {
        const double frozen = path.state(2 * k)[0];
        const double s = 1.0 / (1.0 + frozen * frozen) + 1.0;
        for (int n = 2 * k + 1; n <= 2 * k + 2; ++n) {
            x += s * path.innovation(n)[0] / 4.0;
            EXPECT_NEAR(coarse.state(n)[0], x, 1e-14) << n;
        }
    }
}

TEST(CoupledPair, ConstantCoefficientsAgreeOnTheGrid) {
    const auto pair = coupled_pair(constant_model(0.7, 0.3), 32, 32, 5);
    EXPECT_EQ(pair.max_grid_discrepancy(), 0.0);
}

TEST(CoupledPair, DeterministicDriftLag) {
    const auto pair = coupled_pair(constant_model(0.0, 1.0), 100, 6400, 5);
    EXPECT_NEAR(pair.sup_squared_error(), 1e-4, 1e-15);
}

TEST(CoupledPair, SameSeedIsBitIdentical) {
    const auto m = model_preset("tanh-1d");
    EXPECT_EQ(coupled_pair(m, 16, 256, 9, 2), coupled_pair(m, 16, 256, 9, 2));
    EXPECT_FALSE(coupled_pair(m, 16, 256, 9, 2) == coupled_pair(m, 16, 256, 9, 3));
}

TEST(CoupledPair, FineIncrementsAggregateToChainInnovations) {
    const int n = 16, refine = 8;
    const auto pair = coupled_pair(model_preset("tanh-1d"), n, n * refine, 4);
    for (int k = 1; k <= n; ++k) {
        double sum = 0.0;
        for (int j = (k - 1) * refine; j < k * refine; ++j) sum += pair.brownian_steps[static_cast<std::size_t>(j)];
        EXPECT_NEAR(sum, pair.chain.innovation(k)[0] / std::sqrt(static_cast<double>(n)), 1e-12) << k;
    }
}

TEST(CoupledPair, RejectsIncompatibleGrid) {
    EXPECT_THROW(coupled_pair(model_preset("bm-1d"), 16, 24, 1), InvalidInput);
}

TEST(PathCsv, RoundTrip) {
    const auto path = simulate_path(model_preset("gbm-2d"), InnovationLaw::rademacher(2), 7, 12);
    std::stringstream io;
    write_path_csv(io, path);
    EXPECT_EQ(read_path_csv(io), path);
}

TEST(PathCsv, RoundTripWithoutAtoms) {
    const auto pair = coupled_pair(model_preset("tanh-1d"), 9, 9, 2);
    std::stringstream io;
    write_path_csv(io, pair.chain);
    EXPECT_EQ(read_path_csv(io), pair.chain);
}

TEST(PathCsv, RejectsGarbage) {
    std::stringstream io("step,time\n1,2\n");
    EXPECT_THROW(read_path_csv(io), InvalidInput);
}

TEST(PathBatch, RoundTrip) {
    std::vector<DiscretePath> paths;
    for (int r = 0; r < 5; ++r)
        paths.push_back(simulate_path(model_preset("sine-1d"), InnovationLaw::trinomial(1), 20, 3,
                                      static_cast<std::uint64_t>(r)));
    std::stringstream io;
    write_path_batch(io, paths);
    const std::string bytes = io.str();
    EXPECT_EQ(bytes.substr(0, 4), "GOPB");
    EXPECT_EQ(read_path_batch(io), paths);
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_path_batch(truncated), InvalidInput);
}
