#include <benchmark/benchmark.h>

#include "synq/testbed.hpp"

using namespace synq::testbed;

namespace {

RealSpec bench_spec() {
    RealSpec spec;
    spec.num_classes = 6;
    spec.feature_dim = 16;
    spec.modes_per_class = 2;
    spec.seed = 3;
    return spec;
}

void BM_make_real_dataset(benchmark::State& state) {
    const RealSpec spec = bench_spec();
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(make_real_dataset(spec, n, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_make_real_dataset)->Arg(1000)->Arg(10000);

void BM_sample_synthetic(benchmark::State& state) {
    GeneratorSpec gen;
    gen.base = bench_spec();
    gen.class_coverage = {0, 1, 2, 3, 4, 5};
    gen.affinity_noise_std = 0.3;
    gen.label_corruption_rate = 0.3;
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_synthetic(gen, n, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_sample_synthetic)->Arg(1000)->Arg(10000);

void BM_augment_strong(benchmark::State& state) {
    std::vector<double> x(16, 1.0);
    StrongAugParams params{0.15, 0.125};
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(augment_strong(x, params, ++seed));
}
BENCHMARK(BM_augment_strong);

}  // namespace
