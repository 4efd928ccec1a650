#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "synq/nn.hpp"

namespace synq::testbed {

enum class Source { real, synthetic };
enum class Split { train, standard_test, test };

// Class-conditional Gaussian mixture: each class owns `modes_per_class`
// modes placed around a per-class direction, so classes separate at
// `mode_separation` scale while samples scatter at `within_mode_std`.
struct RealSpec {
    std::size_t num_classes = 6;
    std::size_t feature_dim = 16;
    std::size_t modes_per_class = 2;
    std::vector<double> class_prior;  // empty = uniform
    double mode_separation = 2.0;
    double within_mode_std = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::vector<double> prior() const;  // uniform-filled, validated
};

// Knobs controlling a simulated synthetic-data source. `affinity_noise_std`
// and `label_corruption_rate` degrade affinity; `class_coverage` and
// `mode_dropout` degrade diversity; `conditional=false` severs the link
// between features and emitted conditions entirely.
struct GeneratorSpec {
    RealSpec base;
    double affinity_noise_std = 0.0;
    double label_corruption_rate = 0.0;
    std::vector<int> class_coverage;  // classes the generator "was trained on"
    double mode_dropout = 0.0;
    bool conditional = true;
    std::uint64_t seed = 0;

    void validate() const;
};

// Column-flat sample store. `latents` is testbed ground truth for
// evaluation only; training code paths must read features/conditions.
struct Dataset {
    std::size_t feature_dim = 0;
    std::vector<double> features;  // n x feature_dim, row-major
    std::vector<int> conditions;
    std::vector<int> latents;
    std::vector<Source> sources;
    Split split = Split::train;

    std::size_t size() const { return conditions.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * feature_dim, feature_dim};
    }
    nn::MatrixView view() const { return {features.data(), size(), feature_dim}; }
    void append(std::span<const double> x, int condition, int latent, Source src);
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

Dataset make_real_dataset(const RealSpec& spec, std::size_t n, std::uint64_t seed);

Dataset sample_synthetic(const GeneratorSpec& gen, std::size_t n, std::uint64_t seed);

std::vector<double> augment_weak(std::span<const double> x, double noise_std,
                                 std::uint64_t seed);

struct StrongAugParams {
    double scale_half_range = 0.1;  // scalar drawn from [1-a, 1+a]
    double mask_fraction = 0.25;    // fraction of coordinates zeroed
};

std::vector<double> augment_strong(std::span<const double> x, const StrongAugParams& params,
                                   std::uint64_t seed);

// Mixture geometry, exposed for oracles.
std::vector<double> mode_center(const RealSpec& spec, int cls, int mode);

}  // namespace synq::testbed
