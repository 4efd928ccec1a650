#include <benchmark/benchmark.h>

#include "synq/nn.hpp"
#include "synq/rng.hpp"

using namespace synq;

namespace {

std::vector<double> random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(rows * cols);
    for (auto& v : x) v = rng.normal();
    return x;
}

void BM_forward(benchmark::State& state) {
    const std::size_t hidden = static_cast<std::size_t>(state.range(0));
    const nn::ModelConfig cfg{16, {hidden}, 6, 1};
    const nn::ModelState model = nn::init_model(cfg);
    const auto x = random_batch(64, 16, 2);
    const nn::MatrixView view(x.data(), 64, 16);
    for (auto _ : state) benchmark::DoNotOptimize(nn::forward(model, view));
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_forward)->Arg(16)->Arg(48)->Arg(128);

void BM_backward_task(benchmark::State& state) {
    const std::size_t hidden = static_cast<std::size_t>(state.range(0));
    const nn::ModelConfig cfg{16, {hidden}, 6, 1};
    const nn::ModelState model = nn::init_model(cfg);
    const auto x = random_batch(64, 16, 2);
    const nn::MatrixView view(x.data(), 64, 16);
    Rng rng(3);
    std::vector<int> labels(64);
    for (auto& y : labels) y = static_cast<int>(rng.index(6));
    const auto spec = nn::LossSpec::task_loss(labels);
    for (auto _ : state) benchmark::DoNotOptimize(nn::backward(model, view, spec));
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_backward_task)->Arg(16)->Arg(48)->Arg(128);

void BM_backward_cons(benchmark::State& state) {
    const nn::ModelConfig cfg{16, {48}, 6, 1};
    const nn::ModelState model = nn::init_model(cfg);
    const auto x = random_batch(64, 16, 2);
    auto twin = x;
    Rng rng(4);
    for (auto& v : twin) v += 0.1 * rng.normal();
    const nn::MatrixView view(x.data(), 64, 16);
    const auto spec = nn::LossSpec::cons_loss(nn::MatrixView(twin.data(), 64, 16));
    for (auto _ : state) benchmark::DoNotOptimize(nn::backward(model, view, spec));
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_backward_cons);

}  // namespace
