#include <benchmark/benchmark.h>

#include "gameopt/diagnostics.hpp"
#include "gameopt/dynkin.hpp"
#include "gameopt/model.hpp"
#include "gameopt/payoff.hpp"
#include "gameopt/scheme.hpp"
#include "gameopt/tree.hpp"

using namespace gameopt;

namespace {

PayoffPair israeli_put() {
    PayoffSpec spec;
    spec.strike = 1.1;
    spec.penalty = 0.05;
    return make_payoff(spec);
}

void BM_Step(benchmark::State& state) {
    const auto model = model_preset("sine-1d");
    Vector x = Vector::Constant(1, 0.3);
    const Vector xi = Vector::Constant(1, 1.0);
    for (auto _ : state) {
        x = step(x, xi, model, 1024);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_Step);

void BM_SimulatePath(benchmark::State& state) {
    const auto model = model_preset("tanh-1d");
    const auto law = InnovationLaw::rademacher(1);
    const int n = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_path(model, law, n, 1, stream++));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SimulatePath)->Range(64, 4096);

void BM_RecombiningValue(benchmark::State& state) {
    const auto model = model_preset("gbm-1d");
    const auto law = InnovationLaw::rademacher(1);
    const auto pair = israeli_put();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto tree = build_tree(model, law, n, tree_options_for(pair, true, 1'000'000));
        benchmark::DoNotOptimize(backward_value(tree, pair, 1).value);
    }
}
BENCHMARK(BM_RecombiningValue)->RangeMultiplier(2)->Range(16, 512);

void BM_FullTreeValue(benchmark::State& state) {
    const auto model = model_preset("tanh-1d");
    const auto law = InnovationLaw::rademacher(1);
    const auto pair = israeli_put();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const auto tree = build_tree(model, law, n);
        benchmark::DoNotOptimize(backward_value(tree, pair, 1).value);
    }
}
BENCHMARK(BM_FullTreeValue)->DenseRange(8, 16, 4);

void BM_BruteForce(benchmark::State& state) {
    const auto model = model_preset("tanh-1d");
    const auto law = InnovationLaw::rademacher(1);
    const auto pair = israeli_put();
    const auto tree = build_tree(model, law, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_value(tree, pair).inf_sup);
}
BENCHMARK(BM_BruteForce)->DenseRange(1, 4);

}  // namespace
BENCHMARK_MAIN();
