#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "synq/nn.hpp"
#include "synq/testbed.hpp"
#include "synq/train_config.hpp"

namespace synq::syncheck {

// ---------------------------------------------------------------------------
// Loss values on forward outputs. These are the reporting/verification
// route; nn::backward computes the same quantities from logits when
// gradients are needed.
// ---------------------------------------------------------------------------

// mean cross-entropy of the task head (natural log)
double l_task(const nn::ForwardOutput& output, std::span<const int> labels);

// one-vs-all detector loss: -log p_inlier of the label's detector plus
// -log p_outlier of the hardest negative (smallest p_outlier among j != y)
double l_ova(const nn::ForwardOutput& output, std::span<const int> labels);

// squared L2 between detector pairs plus squared L2 between task
// probability vectors, clean vs weak-augmented twin; batch mean
double l_cons(const nn::ForwardOutput& clean, const nn::ForwardOutput& noisy);

// sum of the detectors' binary entropies, batch mean
double l_ent(const nn::ForwardOutput& output);

// Synthetic samples accepted as inliers, with their pseudo-labels.
struct InlierSet {
    std::vector<std::size_t> indices;      // into the synthetic dataset
    std::vector<double> acceptance_probs;  // p_inlier of the predicted class
    std::vector<int> pseudo_labels;

    std::size_t size() const { return indices.size(); }
};

// yhat = argmax task probability (ties -> lowest class); accepted iff
// detector yhat's p_inlier >= tau. Conditions are never consulted.
InlierSet assign_pseudo_labels(const nn::ModelState& state, const testbed::Dataset& synthetic,
                               double tau);

// cross-entropy of strong-augmented accepted samples against their
// pseudo-labels; 0 when the inlier set is empty
double l_pseu(const nn::ModelState& state, const InlierSet& inliers,
              const testbed::Dataset& synthetic, const testbed::StrongAugParams& strong_aug,
              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Two-phase trainer
// ---------------------------------------------------------------------------

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double l_task = 0.0;
    double l_ova = 0.0;
    double l_cons = 0.0;
    double l_ent = 0.0;
    double l_pseu = 0.0;
    double total = 0.0;  // weighted sum actually optimized
    std::size_t inlier_count = 0;
    double inlier_precision = 0.0;  // accepted pseudo-labels vs latent truth (evaluation only)
    double test_accuracy = 0.0;     // NaN when no eval set was provided
    double lr = 0.0;
};

struct History {
    std::vector<EpochStats> epochs;
};

struct TrainResult {
    nn::ModelState state;
    History history;
    InlierSet final_inliers;
};

// Warm-up epochs 1..E1 train with task+ova on real batches and cons+ent on
// synthetic batches; iteration epochs E1+1..E re-assign pseudo-labels and
// add the pseudo-label loss on strong-augmented accepted samples. Synthetic
// conditions are never read; only features (and, for history metrics,
// latent ground truth).
TrainResult train_syncheck(const testbed::Dataset& real, const testbed::Dataset& synthetic,
                           const nn::ModelConfig& model_config, const TrainConfig& train_config,
                           const testbed::Dataset* eval_set = nullptr);

// Accepted samples with pseudo-labels substituted for conditions; latent
// ground truth is carried through for evaluation.
testbed::Dataset export_filtered(const testbed::Dataset& synthetic, const InlierSet& inliers);

void write_history_csv(const History& history, const std::filesystem::path& path);

}  // namespace synq::syncheck
