#include "synq/syncheck.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "synq/rng.hpp"
#include "synq/supervised.hpp"

namespace synq::syncheck {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// shuffled cyclic index stream; reshuffles whenever the set is exhausted
class IndexStream {
public:
    IndexStream(std::size_t n, std::uint64_t seed) : rng_(seed), order_(n), pos_(n) {
        std::iota(order_.begin(), order_.end(), 0);
    }

    std::size_t next() {
        if (pos_ >= order_.size()) {
            rng_.shuffle(order_);
            pos_ = 0;
        }
        return order_[pos_++];
    }

private:
    Rng rng_;
    std::vector<std::size_t> order_;
    std::size_t pos_;
};

void gather(const testbed::Dataset& ds, std::span<const std::size_t> idx,
            std::vector<double>& features) {
    features.clear();
    for (std::size_t i : idx) {
        const auto row = ds.row(i);
        features.insert(features.end(), row.begin(), row.end());
    }
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace

double l_task(const nn::ForwardOutput& output, std::span<const int> labels) {
    if (labels.size() != output.rows) throw std::invalid_argument("l_task: label count mismatch");
    double loss = 0.0;
    for (std::size_t r = 0; r < output.rows; ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= output.num_classes)
            throw std::invalid_argument("l_task: label out of range");
        loss += -std::log(output.task_prob(r, y));
    }
    return loss / static_cast<double>(output.rows);
}

double l_ova(const nn::ForwardOutput& output, std::span<const int> labels) {
    if (labels.size() != output.rows) throw std::invalid_argument("l_ova: label count mismatch");
    if (output.num_classes < 2) throw std::invalid_argument("l_ova: needs >= 2 classes");
    const std::size_t C = output.num_classes;
    double loss = 0.0;
    for (std::size_t r = 0; r < output.rows; ++r) {
        const std::size_t y = static_cast<std::size_t>(labels[r]);
        double hardest = 2.0;
        for (std::size_t j = 0; j < C; ++j) {
            if (j == y) continue;
            hardest = std::min(hardest, output.det_outlier(r, j));
        }
        loss += -std::log(output.det_inlier(r, y)) - std::log(hardest);
    }
    return loss / static_cast<double>(output.rows);
}

double l_cons(const nn::ForwardOutput& clean, const nn::ForwardOutput& noisy) {
    if (clean.rows != noisy.rows || clean.num_classes != noisy.num_classes)
        throw std::invalid_argument("l_cons: output shape mismatch");
    const std::size_t C = clean.num_classes;
    double loss = 0.0;
    for (std::size_t r = 0; r < clean.rows; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
            const double d = clean.task_prob(r, c) - noisy.task_prob(r, c);
            loss += d * d;
        }
        for (std::size_t j = 0; j < C; ++j) {
            const double di = clean.det_inlier(r, j) - noisy.det_inlier(r, j);
            const double dout = clean.det_outlier(r, j) - noisy.det_outlier(r, j);
            loss += di * di + dout * dout;
        }
    }
    return loss / static_cast<double>(clean.rows);
}

double l_ent(const nn::ForwardOutput& output) {
    const std::size_t C = output.num_classes;
    double loss = 0.0;
    for (std::size_t r = 0; r < output.rows; ++r) {
        for (std::size_t j = 0; j < C; ++j) {
            const double pi = output.det_inlier(r, j);
            const double po = output.det_outlier(r, j);
            if (pi > 0.0) loss += -pi * std::log(pi);
            if (po > 0.0) loss += -po * std::log(po);
        }
    }
    return loss / static_cast<double>(output.rows);
}

InlierSet assign_pseudo_labels(const nn::ModelState& state, const testbed::Dataset& synthetic,
                               double tau) {
    InlierSet set;
    if (synthetic.size() == 0) return set;
    const nn::ForwardOutput out = nn::forward(state, synthetic.view());
    for (std::size_t i = 0; i < out.rows; ++i) {
        std::size_t yhat = 0;
        for (std::size_t c = 1; c < out.num_classes; ++c)
            if (out.task_prob(i, c) > out.task_prob(i, yhat)) yhat = c;
        const double p_in = out.det_inlier(i, yhat);
        if (p_in >= tau) {
            set.indices.push_back(i);
            set.acceptance_probs.push_back(p_in);
            set.pseudo_labels.push_back(static_cast<int>(yhat));
        }
    }
    return set;
}

double l_pseu(const nn::ModelState& state, const InlierSet& inliers,
              const testbed::Dataset& synthetic, const testbed::StrongAugParams& strong_aug,
              std::uint64_t seed) {
    if (inliers.size() == 0) return 0.0;
    std::vector<double> features;
    features.reserve(inliers.size() * synthetic.feature_dim);
    for (std::size_t k = 0; k < inliers.size(); ++k) {
        const auto aug = testbed::augment_strong(synthetic.row(inliers.indices[k]), strong_aug,
                                                 derive_seed(seed, k));
        features.insert(features.end(), aug.begin(), aug.end());
    }
    const nn::MatrixView view(features.data(), inliers.size(), synthetic.feature_dim);
    return l_task(nn::forward(state, view), inliers.pseudo_labels);
}

testbed::Dataset export_filtered(const testbed::Dataset& synthetic, const InlierSet& inliers) {
    testbed::Dataset out;
    out.feature_dim = synthetic.feature_dim;
    out.split = synthetic.split;
    for (std::size_t k = 0; k < inliers.size(); ++k) {
        const std::size_t i = inliers.indices[k];
        out.append(synthetic.row(i), inliers.pseudo_labels[k], synthetic.latents[i],
                   testbed::Source::synthetic);
    }
    return out;
}

TrainResult train_syncheck(const testbed::Dataset& real, const testbed::Dataset& synthetic,
                           const nn::ModelConfig& model_config, const TrainConfig& cfg,
                           const testbed::Dataset* eval_set) {
    cfg.validate();
    if (real.size() == 0) throw std::invalid_argument("train_syncheck: empty real dataset");
    if (real.feature_dim != model_config.input_dim)
        throw std::invalid_argument("train_syncheck: real dataset width != model input_dim");
    if (synthetic.size() > 0 && synthetic.feature_dim != real.feature_dim)
        throw std::invalid_argument("train_syncheck: dataset widths differ");

    TrainResult result;
    result.state = nn::init_model(model_config);
    nn::ModelState& state = result.state;

    const std::size_t n_real = real.size();
    const std::size_t n_syn = synthetic.size();
    const std::size_t B = cfg.batch_size;
    const std::size_t steps_per_epoch = (std::max(n_real, std::max<std::size_t>(n_syn, 1)) + B - 1) / B;

    IndexStream real_stream(n_real, derive_seed(cfg.seed, 0x7265616c));
    IndexStream syn_stream(std::max<std::size_t>(n_syn, 1), derive_seed(cfg.seed, 0x73796e));
    Rng aug_rng(derive_seed(cfg.seed, 0x617567));

    const LossWeights& w = cfg.loss_weights;
    InlierSet inliers;
    bool have_inliers = false;

    std::vector<std::size_t> real_idx(B), syn_idx(B), pseu_pick(B);
    std::vector<double> real_feat, syn_feat, twin_feat, pseu_feat;
    std::vector<int> real_labels(B), pseu_labels(B);
    std::vector<double> grad(state.params.size());

    for (std::size_t epoch = 1; epoch <= cfg.epochs_total; ++epoch) {
        const bool iterating = epoch > cfg.warmup_epochs;
        const double lr = cfg.lr_at_epoch(epoch - 1);

        if (iterating && n_syn > 0 && (cfg.refresh_pseudo_labels || !have_inliers)) {
            inliers = assign_pseudo_labels(state, synthetic, cfg.inlier_threshold);
            have_inliers = true;
        }
        // fresh stream each epoch so a growing/shrinking inlier set reshuffles
        IndexStream pseu_stream(std::max<std::size_t>(inliers.size(), 1),
                                derive_seed(cfg.seed, 0x70736575 * 131 + epoch));

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        stats.inlier_count = iterating ? inliers.size() : 0;

        for (std::size_t step = 0; step < steps_per_epoch; ++step) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double total = 0.0;

            // real batch: task + ova
            for (std::size_t k = 0; k < B; ++k) {
                real_idx[k] = real_stream.next();
                real_labels[k] = real.conditions[real_idx[k]];
            }
            gather(real, real_idx, real_feat);
            const nn::MatrixView real_view(real_feat.data(), B, real.feature_dim);
            {
                auto res = nn::backward(state, real_view, nn::LossSpec::task_loss(real_labels));
                stats.l_task += res.loss;
                total += w.task * res.loss;
                axpy(w.task, res.grad, grad);
            }
            if (!cfg.ablate_ova) {
                auto res = nn::backward(state, real_view, nn::LossSpec::ova_loss(real_labels));
                stats.l_ova += res.loss;
                total += w.ova * res.loss;
                axpy(w.ova, res.grad, grad);
            }

            // synthetic batch: consistency + entropy (features only)
            if (n_syn > 0 && !cfg.ablate_cons_ent) {
                for (std::size_t k = 0; k < B; ++k) syn_idx[k] = syn_stream.next();
                gather(synthetic, syn_idx, syn_feat);
                twin_feat.resize(syn_feat.size());
                for (std::size_t k = 0; k < B; ++k) {
                    const auto noisy =
                        testbed::augment_weak(synthetic.row(syn_idx[k]), cfg.weak_noise_std,
                                              aug_rng.next_u64());
                    std::copy(noisy.begin(), noisy.end(),
                              twin_feat.begin() + k * synthetic.feature_dim);
                }
                const nn::MatrixView syn_view(syn_feat.data(), B, synthetic.feature_dim);
                const nn::MatrixView twin_view(twin_feat.data(), B, synthetic.feature_dim);
                {
                    auto res = nn::backward(state, syn_view, nn::LossSpec::cons_loss(twin_view));
                    stats.l_cons += res.loss;
                    total += w.cons * res.loss;
                    axpy(w.cons, res.grad, grad);
                }
                {
                    auto res = nn::backward(state, syn_view, nn::LossSpec::ent_loss());
                    stats.l_ent += res.loss;
                    total += w.ent * res.loss;
                    axpy(w.ent, res.grad, grad);
                }
            }

            // accepted synthetic batch: pseudo-label supervision on strong views
            if (iterating && inliers.size() > 0) {
                pseu_feat.clear();
                for (std::size_t k = 0; k < B; ++k) {
                    const std::size_t pick = pseu_stream.next();
                    pseu_pick[k] = inliers.indices[pick];
                    pseu_labels[k] = inliers.pseudo_labels[pick];
                    const auto aug = testbed::augment_strong(
                        synthetic.row(pseu_pick[k]), cfg.strong_aug, aug_rng.next_u64());
                    pseu_feat.insert(pseu_feat.end(), aug.begin(), aug.end());
                }
                const nn::MatrixView pseu_view(pseu_feat.data(), B, synthetic.feature_dim);
                auto res = nn::backward(state, pseu_view, nn::LossSpec::pseu_loss(pseu_labels));
                stats.l_pseu += res.loss;
                total += w.pseu * res.loss;
                axpy(w.pseu, res.grad, grad);
            }

            if (!std::isfinite(total))
                throw std::runtime_error("train_syncheck: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", step " + std::to_string(step));
            stats.total += total;
            nn::sgd_step(state, grad, lr, cfg.momentum);
        }

        const double inv_steps = 1.0 / static_cast<double>(steps_per_epoch);
        stats.l_task *= inv_steps;
        stats.l_ova *= inv_steps;
        stats.l_cons *= inv_steps;
        stats.l_ent *= inv_steps;
        stats.l_pseu *= inv_steps;
        stats.total *= inv_steps;

        // evaluation-only metrics; latents never feed back into training
        if (stats.inlier_count > 0) {
            std::size_t correct = 0;
            for (std::size_t k = 0; k < inliers.size(); ++k)
                if (inliers.pseudo_labels[k] == synthetic.latents[inliers.indices[k]]) ++correct;
            stats.inlier_precision =
                static_cast<double>(correct) / static_cast<double>(inliers.size());
        } else {
            stats.inlier_precision = kNaN;
        }
        if (eval_set != nullptr && eval_set->size() > 0) {
            const auto preds = predict(state, eval_set->view());
            std::size_t correct = 0;
            for (std::size_t i = 0; i < preds.size(); ++i)
                if (preds[i] == eval_set->conditions[i]) ++correct;
            stats.test_accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
        } else {
            stats.test_accuracy = kNaN;
        }

        result.history.epochs.push_back(stats);
    }

    result.final_inliers =
        n_syn > 0 ? assign_pseudo_labels(state, synthetic, cfg.inlier_threshold) : InlierSet{};
    return result;
}

void write_history_csv(const History& history, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "epoch,l_task,l_ova,l_cons,l_ent,l_pseu,inlier_count,inlier_precision,test_accuracy\n";
    out.precision(17);
    for (const auto& e : history.epochs) {
        out << e.epoch << ',' << e.l_task << ',' << e.l_ova << ',' << e.l_cons << ',' << e.l_ent
            << ',' << e.l_pseu << ',' << e.inlier_count << ',' << e.inlier_precision << ','
            << e.test_accuracy << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace synq::syncheck
