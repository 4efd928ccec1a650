#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "synq/nn.hpp"
#include "synq/rng.hpp"

using namespace synq;
using nn::LossSpec;
using nn::MatrixView;
using nn::ModelConfig;
using nn::ModelState;

namespace {

std::vector<double> random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(rows * cols);
    for (auto& v : x) v = rng.normal();
    return x;
}

std::vector<int> random_labels(std::size_t rows, std::size_t C, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> y(rows);
    for (auto& v : y) v = static_cast<int>(rng.index(C));
    return y;
}

}  // namespace

TEST_CASE("parameter count follows the layer shapes") {
    ModelConfig cfg{4, {8}, 3, 0};
    // 4*8+8 backbone, 8*3+3 task head, 8*6+6 detector heads
    CHECK(cfg.param_count() == 121);

    ModelConfig direct{5, {}, 2, 0};
    CHECK(direct.param_count() == 5 * 2 + 2 + 5 * 4 + 4);
}

TEST_CASE("init is deterministic in the seed") {
    ModelConfig cfg{6, {12, 7}, 4, 99};
    const ModelState a = nn::init_model(cfg);
    const ModelState b = nn::init_model(cfg);
    CHECK(a.params == b.params);

    cfg.seed = 100;
    const ModelState c = nn::init_model(cfg);
    CHECK(a.params != c.params);
}

TEST_CASE("invalid configs are rejected") {
    CHECK_THROWS_AS(nn::init_model(ModelConfig{0, {4}, 3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(nn::init_model(ModelConfig{4, {0}, 3, 0}), std::invalid_argument);
    CHECK_THROWS_AS(nn::init_model(ModelConfig{4, {4}, 1, 0}), std::invalid_argument);
}

TEST_CASE("forward output satisfies the probability contracts") {
    const ModelConfig cfg{10, {16}, 5, 3};
    const ModelState state = nn::init_model(cfg);
    const auto x = random_batch(33, 10, 17);
    const auto out = nn::forward(state, MatrixView(x.data(), 33, 10));
    for (std::size_t r = 0; r < 33; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 5; ++c) {
            const double p = out.task_prob(r, c);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(out.det_inlier(r, j) + out.det_outlier(r, j) ==
                  doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("zero-weight model is uniform") {
    const ModelConfig cfg{4, {6}, 4, 0};
    ModelState state = nn::init_model(cfg);
    std::fill(state.params.begin(), state.params.end(), 0.0);
    const auto x = random_batch(5, 4, 23);
    const auto out = nn::forward(state, MatrixView(x.data(), 5, 4));
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            CHECK(out.task_prob(r, c) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("no hidden layers still works") {
    const ModelConfig cfg{4, {}, 3, 1};
    const ModelState state = nn::init_model(cfg);
    const auto x = random_batch(7, 4, 29);
    const auto out = nn::forward(state, MatrixView(x.data(), 7, 4));
    for (std::size_t r = 0; r < 7; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) sum += out.task_prob(r, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("dimension mismatch raises a shape error") {
    const ModelState state = nn::init_model(ModelConfig{4, {8}, 3, 0});
    const auto x = random_batch(3, 5, 31);
    CHECK_THROWS_AS(nn::forward(state, MatrixView(x.data(), 3, 5)), std::invalid_argument);
}

TEST_CASE("constant loss has zero gradient") {
    const ModelConfig cfg{6, {8}, 3, 5};
    const ModelState state = nn::init_model(cfg);
    const auto x = random_batch(9, 6, 37);
    // consistency against an identical twin is identically zero
    const MatrixView view(x.data(), 9, 6);
    const auto res = nn::backward(state, view, LossSpec::cons_loss(view));
    CHECK(res.loss == 0.0);
    for (double g : res.grad) CHECK(g == 0.0);
}

namespace {

// Central finite differences: the independent oracle for backward().
double loss_value(const ModelState& state, MatrixView batch, const LossSpec& spec) {
    return nn::backward(state, batch, spec).loss;
}

double max_rel_error(const ModelState& state, MatrixView batch, const LossSpec& spec,
                     double h = 1e-5) {
    const auto analytic = nn::backward(state, batch, spec);
    ModelState probe = state;
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.params.size(); ++i) {
        const double keep = probe.params[i];
        probe.params[i] = keep + h;
        const double up = loss_value(probe, batch, spec);
        probe.params[i] = keep - h;
        const double down = loss_value(probe, batch, spec);
        probe.params[i] = keep;
        const double fd = (up - down) / (2.0 * h);
        const double err =
            std::abs(analytic.grad[i] - fd) / std::max(1e-3, std::abs(analytic.grad[i]) + std::abs(fd));
        worst = std::max(worst, err);
    }
    return worst;
}

// ReLU kinks and OVA argmin ties make the loss non-smooth; reject draws
// that sit within a safety margin of either.
bool smooth_at(const ModelState& state, MatrixView batch, std::size_t C) {
    const auto out = nn::forward(state, batch);
    for (std::size_t r = 0; r < out.rows; ++r) {
        std::vector<double> outs;
        for (std::size_t j = 0; j < C; ++j) outs.push_back(out.det_outlier(r, j));
        std::sort(outs.begin(), outs.end());
        if (outs[1] - outs[0] < 1e-3) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
    // 20 random (config, batch, loss) triples with <= 500 parameters
    const nn::LossKind kinds[] = {nn::LossKind::task, nn::LossKind::ova, nn::LossKind::cons,
                                  nn::LossKind::ent, nn::LossKind::pseu};
    std::size_t accepted = 0;
    std::uint64_t attempt = 0;
    double worst = 0.0;
    while (accepted < 20 && attempt < 200) {
        ++attempt;
        Rng rng(derive_seed(0xfd, attempt));
        ModelConfig cfg;
        cfg.input_dim = 2 + rng.index(6);
        if (rng.uniform() < 0.8) cfg.hidden_dims = {2 + rng.index(10)};
        cfg.num_classes = 2 + rng.index(3);
        cfg.seed = rng.next_u64();
        if (cfg.param_count() > 500) continue;
        const std::size_t rows = 2 + rng.index(5);
        const auto x = random_batch(rows, cfg.input_dim, rng.next_u64());
        const MatrixView view(x.data(), rows, cfg.input_dim);
        const ModelState state = nn::init_model(cfg);
        if (!smooth_at(state, view, cfg.num_classes)) continue;

        const nn::LossKind kind = kinds[accepted % 5];
        LossSpec spec;
        std::vector<double> twin;
        switch (kind) {
            case nn::LossKind::task:
                spec = LossSpec::task_loss(random_labels(rows, cfg.num_classes, rng.next_u64()));
                break;
            case nn::LossKind::ova:
                spec = LossSpec::ova_loss(random_labels(rows, cfg.num_classes, rng.next_u64()));
                break;
            case nn::LossKind::cons: {
                twin = x;
                Rng noise(rng.next_u64());
                for (auto& v : twin) v += 0.3 * noise.normal();
                spec = LossSpec::cons_loss(MatrixView(twin.data(), rows, cfg.input_dim));
                break;
            }
            case nn::LossKind::ent:
                spec = LossSpec::ent_loss();
                break;
            case nn::LossKind::pseu:
                spec = LossSpec::pseu_loss(random_labels(rows, cfg.num_classes, rng.next_u64()));
                break;
        }
        worst = std::max(worst, max_rel_error(state, view, spec));
        ++accepted;
    }
    REQUIRE(accepted == 20);
    CHECK(worst < 1e-4);
}

TEST_CASE("task gradient vanishes at a perfect one-hot prediction") {
    // direct linear heads with saturated logits on the true class
    ModelConfig cfg{3, {}, 3, 0};
    ModelState state = nn::init_model(cfg);
    std::fill(state.params.begin(), state.params.end(), 0.0);
    for (int c = 0; c < 3; ++c) state.params[c * 3 + c] = 60.0;  // task W = 60 * I
    const std::vector<double> x = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const std::vector<int> labels = {0, 1, 2};
    const auto res = nn::backward(state, MatrixView(x.data(), 3, 3), LossSpec::task_loss(labels));
    double norm = 0.0;
    for (double g : res.grad) norm += g * g;
    CHECK(std::sqrt(norm) < 1e-6);
    CHECK(res.loss < 1e-6);
}

TEST_CASE("sgd update rule") {
    ModelConfig cfg{1, {}, 2, 0};
    ModelState state = nn::init_model(cfg);
    std::vector<double> grad(state.params.size(), 0.0);

    SUBCASE("zero gradient leaves parameters unchanged") {
        const auto before = state.params;
        nn::sgd_step(state, grad, 0.5, 0.9);
        CHECK(state.params == before);
        CHECK(state.step_count == 1);
    }
    SUBCASE("zero learning rate leaves parameters unchanged") {
        for (auto& g : grad) g = 1.0;
        const auto before = state.params;
        nn::sgd_step(state, grad, 0.0, 0.0);
        CHECK(state.params == before);
    }
    SUBCASE("single-parameter arithmetic") {
        state.params[0] = 1.0;
        grad[0] = 2.0;
        nn::sgd_step(state, grad, 0.1, 0.0);
        CHECK(state.params[0] == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("non-finite gradients abort") {
        grad[0] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(nn::sgd_step(state, grad, 0.1, 0.0), std::runtime_error);
    }
}

TEST_CASE("training is deterministic and keeps outputs normalized") {
    const ModelConfig cfg{8, {12}, 4, 21};
    const auto x = random_batch(64, 8, 77);
    const auto y = random_labels(64, 4, 78);
    const MatrixView view(x.data(), 64, 8);

    auto train = [&](int steps) {
        ModelState state = nn::init_model(cfg);
        for (int s = 0; s < steps; ++s) {
            const auto res = nn::backward(state, view, LossSpec::task_loss(y));
            nn::sgd_step(state, res.grad, 0.1, 0.9);
        }
        return state;
    };
    const ModelState a = train(25);
    const ModelState b = train(25);
    CHECK(a.params == b.params);
    CHECK(a.step_count == 25);

    const auto out = nn::forward(a, view);
    for (std::size_t r = 0; r < out.rows; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) sum += out.task_prob(r, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(out.det_inlier(r, j) + out.det_outlier(r, j) ==
                  doctest::Approx(1.0).epsilon(1e-9));
    }
}
