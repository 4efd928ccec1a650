#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "synq/nn.hpp"
#include "synq/testbed.hpp"
#include "synq/train_config.hpp"

namespace synq::quality {

enum class Role { train, standard_test, test };

// Per-sample margin: confidence of the label minus the largest confidence
// among other classes, computed on probability vectors so it lives in [-1, 1].
struct MarginRecord {
    double margin = 0.0;
    int label = 0;
    Role role = Role::train;
    bool class_trained_flag = true;
};

struct MarginDistribution {
    std::vector<double> bin_edges;        // bins+1 edges spanning [-1, 1]
    std::vector<std::uint64_t> counts;    // one per bin
    double mean = 0.0;
    double calibration_offset = 0.0;

    std::size_t total() const;
    std::vector<double> normalized() const;
};

inline constexpr std::size_t kDefaultBins = 64;

double margin(std::span<const double> probs, int label);

// One record per sample, using the sample's condition as label. When
// `trained_classes` is given, class_trained_flag marks labels inside it.
std::vector<MarginRecord> collect_margins(const nn::ModelState& state,
                                          const testbed::Dataset& dataset, Role role,
                                          const std::set<int>* trained_classes = nullptr);

struct CalibrationResult {
    std::vector<MarginRecord> calibrated;  // test records shifted by offset, clamped
    double offset = 0.0;                   // mean(train) - mean(standard_test)
};

CalibrationResult calibrate(std::span<const MarginRecord> train,
                            std::span<const MarginRecord> standard_test,
                            std::span<const MarginRecord> test);

MarginDistribution histogram(std::span<const MarginRecord> records,
                             std::size_t bins = kDefaultBins);

// Jensen-Shannon divergence (natural log) between two binned margin
// distributions with identical edges; in [0, ln 2].
double js_divergence(const MarginDistribution& p, const MarginDistribution& q);

// One side of a quality report (either the TR or the TS setup).
struct QualityPart {
    double js = 0.0;                // calibrated score
    double js_uncalibrated = 0.0;
    double offset = 0.0;
    std::map<int, double> per_class_js;  // vs. the overall train reference
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    MarginDistribution train_hist;
    MarginDistribution test_hist;   // calibrated
    nn::ModelState model;           // the trained probe, reusable by callers
};

// Train-on-real / test-on-synthetic: the affinity probe. Reserves a
// standard-test slice out of real_train for calibration.
QualityPart tr_quality(const testbed::Dataset& real_train, const testbed::Dataset& synthetic,
                       const nn::ModelConfig& model_config, const TrainConfig& train_config,
                       std::size_t bins = kDefaultBins);

// Train-on-synthetic / test-on-real: the diversity probe. Conditions act
// as labels for the synthetic train set.
QualityPart ts_quality(const testbed::Dataset& synthetic, const testbed::Dataset& real_test,
                       const nn::ModelConfig& model_config, const TrainConfig& train_config,
                       std::size_t bins = kDefaultBins);

struct QualityReport {
    QualityPart tr;
    QualityPart ts;
};

struct Correlation {
    double r = 0.0;
    double t_stat = 0.0;
};

Correlation pearson(std::span<const double> xs, std::span<const double> ys);

// Seeded 90/10 split used for the standard-test slice; exposed for tests.
struct StandardSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> standard_test_indices;
};
StandardSplit standard_split(std::size_t n, double fraction, std::uint64_t seed);

}  // namespace synq::quality
