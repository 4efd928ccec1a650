#include <benchmark/benchmark.h>

#include "synq/quality.hpp"
#include "synq/rng.hpp"

using namespace synq;
using namespace synq::quality;

namespace {

std::vector<MarginRecord> random_records(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<MarginRecord> records(n);
    for (auto& r : records) r.margin = rng.uniform(-1.0, 1.0);
    return records;
}

void BM_histogram(benchmark::State& state) {
    const auto records = random_records(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(histogram(records));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_histogram)->Arg(1000)->Arg(10000);

void BM_js_divergence(benchmark::State& state) {
    const auto p = histogram(random_records(5000, 8));
    const auto q = histogram(random_records(5000, 9));
    for (auto _ : state) benchmark::DoNotOptimize(js_divergence(p, q));
}
BENCHMARK(BM_js_divergence);

void BM_calibrate(benchmark::State& state) {
    const auto train = random_records(2000, 10);
    const auto standard = random_records(200, 11);
    const auto test = random_records(2000, 12);
    for (auto _ : state) benchmark::DoNotOptimize(calibrate(train, standard, test));
}
BENCHMARK(BM_calibrate);

}  // namespace
