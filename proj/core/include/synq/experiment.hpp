#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "synq/nn.hpp"
#include "synq/testbed.hpp"
#include "synq/train_config.hpp"

namespace synq::experiment {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Testbed knobs as configured: the real-source spec plus the generator
// degradations and dataset sizes.
struct TestbedConfig {
    testbed::RealSpec real;
    double affinity_noise_std = 0.0;
    double label_corruption_rate = 0.0;
    std::vector<int> class_coverage;  // empty resolves to all classes
    double mode_dropout = 0.0;
    bool conditional = true;
    std::size_t n_real_train = 2000;
    std::size_t n_real_test = 3000;
    double volume_percent = 100.0;  // synthetic size as % of n_real_train

    testbed::GeneratorSpec generator() const;
    std::size_t synthetic_count() const;
};

struct SweepAxis {
    std::string axis;  // "", "noise", "volume", "coverage", "ablation"
    std::vector<double> values;
    std::vector<std::string> ablations;  // when axis == "ablation"
};

struct ExperimentConfig {
    std::string preset = "custom";
    TestbedConfig testbed;
    std::vector<std::size_t> hidden_dims = {32};
    TrainConfig train;
    std::vector<std::string> strategies;
    double similarity_threshold = 0.5;
    std::size_t histogram_bins = 64;
    SweepAxis sweep;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::filesystem::path output_dir = "out";

    nn::ModelConfig model_config(std::uint64_t seed) const;
};

// Base config for a named preset: "cross_domain" (partial class coverage,
// strong feature noise), "in_domain" (full coverage, label corruption),
// or "custom" (clean generator).
ExperimentConfig default_config(const std::string& preset);

// Strict parse: unknown keys anywhere are hard errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_json(const ExperimentConfig& config);  // resolved, canonical
std::string config_hash(const ExperimentConfig& config);

struct GeneratedData {
    testbed::Dataset real_train;
    testbed::Dataset real_test;
    testbed::Dataset synthetic;
};
GeneratedData generate(const TestbedConfig& config, std::uint64_t seed);

// CLI verbs as library calls. Return process exit codes:
//   0 success, 1 config error, 2 verification failure, 3 partial strategy failure.
int cmd_gen_data(const ExperimentConfig& config);
int cmd_quality(const ExperimentConfig& config);
int cmd_run(const ExperimentConfig& config, std::size_t jobs = 1);
int cmd_sweep(const ExperimentConfig& config, std::size_t jobs = 1);

struct VerifyOptions {
    std::size_t instances = 1000;
    std::uint64_t seed = 0;
    std::filesystem::path instance_file;  // optional extra claimed-bound instances
    std::filesystem::path output_dir = "out";
};
int cmd_verify(const VerifyOptions& options);

int cmd_report(const std::filesystem::path& output_dir);

}  // namespace synq::experiment
