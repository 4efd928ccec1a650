#include "synq/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "synq/supervised.hpp"

namespace synq::baselines {

namespace {

testbed::Dataset concat(const testbed::Dataset& a, const testbed::Dataset& b) {
    testbed::Dataset out = a;
    for (std::size_t i = 0; i < b.size(); ++i)
        out.append(b.row(i), b.conditions[i], b.latents[i], b.sources[i]);
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace

double evaluate_accuracy(const nn::ModelState& state, const testbed::Dataset& real_test) {
    if (real_test.size() == 0) throw std::invalid_argument("evaluate_accuracy: empty test set");
    const auto preds = predict(state, real_test.view());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == real_test.conditions[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

StrategyResult train_real_only(const testbed::Dataset& real_train,
                               const testbed::Dataset& real_test,
                               const nn::ModelConfig& model_config, const TrainConfig& cfg) {
    const nn::ModelState state = fit_supervised(real_train, model_config, cfg);
    return {"real_only", evaluate_accuracy(state, real_test), 1.0, cfg.seed};
}

StrategyResult train_mixture(const testbed::Dataset& real_train,
                             const testbed::Dataset& synthetic,
                             const testbed::Dataset& real_test,
                             const nn::ModelConfig& model_config, const TrainConfig& cfg) {
    const testbed::Dataset merged = concat(real_train, synthetic);
    const nn::ModelState state = fit_supervised(merged, model_config, cfg);
    return {"mixture", evaluate_accuracy(state, real_test), 1.0, cfg.seed};
}

testbed::Dataset filter_similarity(const testbed::Dataset& real,
                                   const testbed::Dataset& synthetic, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw std::invalid_argument("filter_similarity: threshold must be in (0, 1)");
    if (synthetic.size() > 0 && real.size() > 0 && synthetic.feature_dim != real.feature_dim)
        throw std::invalid_argument("filter_similarity: dataset widths differ");
    // index real rows per class
    std::vector<std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < real.size(); ++i) {
        const auto c = static_cast<std::size_t>(real.conditions[i]);
        if (c >= by_class.size()) by_class.resize(c + 1);
        by_class[c].push_back(i);
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < synthetic.size(); ++i) {
        const auto c = static_cast<std::size_t>(synthetic.conditions[i]);
        if (c >= by_class.size() || by_class[c].empty()) continue;  // class absent: rejected
        double best = -1.0;
        for (std::size_t r : by_class[c]) best = std::max(best, cosine(synthetic.row(i), real.row(r)));
        if (best >= threshold) kept.push_back(i);
    }
    return synthetic.subset(kept);
}

testbed::Dataset filter_trts(const testbed::Dataset& real_train,
                             const testbed::Dataset& synthetic,
                             const nn::ModelConfig& model_config, const TrainConfig& cfg,
                             const nn::ModelState* reuse_model) {
    if (synthetic.size() == 0) return synthetic;
    nn::ModelState local;
    const nn::ModelState* model = reuse_model;
    if (model == nullptr) {
        local = fit_supervised(real_train, model_config, cfg);
        model = &local;
    }
    const auto preds = predict(*model, synthetic.view());
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < synthetic.size(); ++i)
        if (preds[i] == synthetic.conditions[i]) kept.push_back(i);
    return synthetic.subset(kept);
}

StrategyResult filter_then_condition_label(const testbed::Dataset& real_train,
                                           const testbed::Dataset& synthetic,
                                           const syncheck::InlierSet& accepted,
                                           const testbed::Dataset& real_test,
                                           const nn::ModelConfig& model_config,
                                           const TrainConfig& cfg) {
    // accepted samples keep their generation conditions as labels
    testbed::Dataset filtered = synthetic.subset(accepted.indices);
    const testbed::Dataset merged = concat(real_train, filtered);
    const nn::ModelState state = fit_supervised(merged, model_config, cfg);
    const double kept = synthetic.size() == 0
                            ? 0.0
                            : static_cast<double>(accepted.size()) /
                                  static_cast<double>(synthetic.size());
    return {"filter_cond_label", evaluate_accuracy(state, real_test), kept, cfg.seed};
}

}  // namespace synq::baselines
