#include "synq/supervised.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "synq/rng.hpp"

namespace synq {

void TrainConfig::validate() const {
    if (epochs_total == 0) throw std::invalid_argument("TrainConfig: epochs_total must be >= 1");
    if (warmup_epochs == 0 || warmup_epochs >= epochs_total)
        throw std::invalid_argument("TrainConfig: need 0 < warmup_epochs < epochs_total");
    if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (lr_decay_factor <= 0.0 || lr_decay_factor > 1.0)
        throw std::invalid_argument("TrainConfig: lr_decay_factor must be in (0, 1]");
    if (lr_decay_interval == 0)
        throw std::invalid_argument("TrainConfig: lr_decay_interval must be >= 1");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (inlier_threshold <= 0.0 || inlier_threshold >= 1.0)
        throw std::invalid_argument("TrainConfig: inlier_threshold must be in (0, 1)");
    if (weak_noise_std < 0.0)
        throw std::invalid_argument("TrainConfig: weak_noise_std must be >= 0");
    if (standard_test_fraction <= 0.0 || standard_test_fraction >= 1.0)
        throw std::invalid_argument("TrainConfig: standard_test_fraction must be in (0, 1)");
    const LossWeights& w = loss_weights;
    if (w.task <= 0 || w.ova <= 0 || w.cons <= 0 || w.ent <= 0 || w.pseu <= 0)
        throw std::invalid_argument("TrainConfig: loss weights must be > 0");
}

double TrainConfig::lr_at_epoch(std::size_t epoch) const {
    const std::size_t decays = epoch / lr_decay_interval;
    return learning_rate * std::pow(lr_decay_factor, static_cast<double>(decays));
}

nn::ModelState fit_supervised(const testbed::Dataset& train, const nn::ModelConfig& model_config,
                              const TrainConfig& cfg) {
    if (train.size() == 0) throw std::invalid_argument("fit_supervised: empty training set");
    if (train.feature_dim != model_config.input_dim)
        throw std::invalid_argument("fit_supervised: dataset width != model input_dim");

    nn::ModelState state = nn::init_model(model_config);
    Rng order_rng(derive_seed(cfg.seed, 0x7375702d6f726472));

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> batch_features;
    std::vector<int> batch_labels;

    for (std::size_t epoch = 0; epoch < cfg.epochs_total; ++epoch) {
        order_rng.shuffle(order);
        const double lr = cfg.lr_at_epoch(epoch);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            batch_features.clear();
            batch_labels.clear();
            for (std::size_t k = start; k < stop; ++k) {
                const auto row = train.row(order[k]);
                batch_features.insert(batch_features.end(), row.begin(), row.end());
                batch_labels.push_back(train.conditions[order[k]]);
            }
            const nn::MatrixView view(batch_features.data(), stop - start, train.feature_dim);
            auto res = nn::backward(state, view, nn::LossSpec::task_loss(batch_labels));
            if (!std::isfinite(res.loss))
                throw std::runtime_error("fit_supervised: non-finite loss at epoch " +
                                         std::to_string(epoch));
            nn::sgd_step(state, res.grad, lr, cfg.momentum);
        }
    }
    return state;
}

std::vector<int> predict(const nn::ModelState& state, nn::MatrixView batch) {
    const nn::ForwardOutput out = nn::forward(state, batch);
    std::vector<int> preds(out.rows);
    for (std::size_t r = 0; r < out.rows; ++r) {
        int best = 0;
        for (std::size_t c = 1; c < out.num_classes; ++c)
            if (out.task_prob(r, c) > out.task_prob(r, best)) best = static_cast<int>(c);
        preds[r] = best;
    }
    return preds;
}

}  // namespace synq
