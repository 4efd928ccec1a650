#pragma once

#include <cstddef>
#include <cstdint>

#include "synq/testbed.hpp"

namespace synq {

struct LossWeights {
    double task = 1.0;
    double ova = 1.0;
    double cons = 1.0;
    double ent = 1.0;
    double pseu = 1.0;
};

// Shared training recipe. The plain supervised trainers (quality metric
// runs, baselines) use the schedule fields only; the SynCheck trainer
// uses everything.
struct TrainConfig {
    std::size_t epochs_total = 40;
    std::size_t warmup_epochs = 12;  // phase 1 length E1
    double learning_rate = 0.1;
    double lr_decay_factor = 0.5;      // StepLR-style multiplicative decay
    std::size_t lr_decay_interval = 15;  // epochs between decays
    double momentum = 0.9;
    std::size_t batch_size = 64;
    LossWeights loss_weights;
    double inlier_threshold = 0.5;  // tau
    double weak_noise_std = 0.25;
    testbed::StrongAugParams strong_aug;
    bool refresh_pseudo_labels = true;  // re-filter every iteration epoch
    double standard_test_fraction = 0.1;
    bool ablate_ova = false;       // drop L_ova (ablation studies)
    bool ablate_cons_ent = false;  // drop L_cons and L_ent
    std::uint64_t seed = 0;

    void validate() const;
    double lr_at_epoch(std::size_t epoch) const;  // epoch counted from 0
};

}  // namespace synq
