#pragma once

#include <vector>

#include "synq/nn.hpp"
#include "synq/testbed.hpp"
#include "synq/train_config.hpp"

namespace synq {

// Plain supervised task training: cross-entropy on (features, conditions),
// momentum SGD with the config's step schedule. Shared by the quality
// metric runs and the baseline strategies.
nn::ModelState fit_supervised(const testbed::Dataset& train, const nn::ModelConfig& model_config,
                              const TrainConfig& train_config);

// argmax task prediction per row; ties resolve to the lowest class index
std::vector<int> predict(const nn::ModelState& state, nn::MatrixView batch);

}  // namespace synq
