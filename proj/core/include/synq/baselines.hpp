#pragma once

#include <string>
#include <vector>

#include "synq/nn.hpp"
#include "synq/syncheck.hpp"
#include "synq/testbed.hpp"
#include "synq/train_config.hpp"

namespace synq::baselines {

struct StrategyResult {
    std::string strategy;
    double test_accuracy = 0.0;
    double kept_fraction = 1.0;  // filtering strategies report kept/total
    std::uint64_t seed = 0;
};

// fraction of argmax predictions equal to labels; ties -> lowest index
double evaluate_accuracy(const nn::ModelState& state, const testbed::Dataset& real_test);

// (1) supervised training on real data alone
StrategyResult train_real_only(const testbed::Dataset& real_train,
                               const testbed::Dataset& real_test,
                               const nn::ModelConfig& model_config, const TrainConfig& train_config);

// (2) nonselective mixture: union of real and synthetic, conditions as labels
StrategyResult train_mixture(const testbed::Dataset& real_train,
                             const testbed::Dataset& synthetic,
                             const testbed::Dataset& real_test,
                             const nn::ModelConfig& model_config, const TrainConfig& train_config);

// (3) similarity filter: keep a synthetic sample iff its max cosine
// similarity to real samples sharing its condition reaches the threshold
testbed::Dataset filter_similarity(const testbed::Dataset& real,
                                   const testbed::Dataset& synthetic, double threshold);

// (4) TRTS filter: train on real, keep synthetic samples whose predicted
// class equals their condition. Pass `reuse_model` to skip the training run.
testbed::Dataset filter_trts(const testbed::Dataset& real_train,
                             const testbed::Dataset& synthetic,
                             const nn::ModelConfig& model_config, const TrainConfig& train_config,
                             const nn::ModelState* reuse_model = nullptr);

// SynCheck's accepted set trained with generation conditions as labels
// instead of pseudo-labels (the pseudo-label-origin microbenchmark)
StrategyResult filter_then_condition_label(const testbed::Dataset& real_train,
                                           const testbed::Dataset& synthetic,
                                           const syncheck::InlierSet& accepted,
                                           const testbed::Dataset& real_test,
                                           const nn::ModelConfig& model_config,
                                           const TrainConfig& train_config);

}  // namespace synq::baselines
