#include <benchmark/benchmark.h>

#include "xkm/bench.hpp"
#include "xkm/exact.hpp"
#include "xkm/kmeans.hpp"
#include "xkm/tree_builder.hpp"

namespace {

struct Fixture {
    xkm::Dataset data;
    xkm::Clustering clustering;
};

Fixture make_fixture(std::size_t n, std::size_t k, std::size_t d) {
    Fixture f{xkm::gaussian_mixture(n, k, d, 3.0, 42), {}};
    xkm::SeedConfig cfg;
    cfg.restarts = 1;
    f.clustering = xkm::kmeanspp_lloyd(f.data, k, cfg);
    return f;
}

void BM_PostProcess2D(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto k = static_cast<std::size_t>(state.range(1));
    const Fixture f = make_fixture(n, k, 2);
    for (auto _ : state) {
        auto r = xkm::post_process(f.data, f.clustering, xkm::ModeChoice::TwoD);
        benchmark::DoNotOptimize(r.cost);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PostProcess2D)->Args({1000, 10})->Args({10000, 10})->Args({10000, 100});

void BM_PostProcessHD(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto k = static_cast<std::size_t>(state.range(1));
    const auto d = static_cast<std::size_t>(state.range(2));
    const Fixture f = make_fixture(n, k, d);
    for (auto _ : state) {
        auto r = xkm::post_process(f.data, f.clustering, xkm::ModeChoice::HD);
        benchmark::DoNotOptimize(r.cost);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PostProcessHD)->Args({1000, 10, 5})->Args({10000, 50, 10})->Args({10000, 200, 20});

void BM_ExactDp(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const xkm::Dataset data = xkm::gaussian_mixture(n, 4, 2, 3.0, 7);
    for (auto _ : state) {
        auto r = xkm::optimal_explainable_dp(data, 4);
        benchmark::DoNotOptimize(r.cost);
    }
}
BENCHMARK(BM_ExactDp)->Arg(10)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
