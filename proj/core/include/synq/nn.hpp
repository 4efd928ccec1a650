#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace synq::nn {

// MLP backbone with two linear heads on the shared final activation:
//   task head     : C logits, row softmax
//   detector heads: C independent 2-way softmax pairs (p_inlier, p_outlier)
//
// Parameters live in one flat vector partitioned as
//   [W1 b1 | W2 b2 | ... | W_task b_task | W_det b_det]
// with each W stored row-major (out x in). Everything is double precision.

struct ModelConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t num_classes = 0;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
    std::size_t param_count() const;
};

struct ModelState {
    ModelConfig config;
    std::vector<double> params;
    std::vector<double> velocity;  // momentum buffer, aligned with params
    std::uint64_t step_count = 0;
};

// Non-owning row-major matrix view used for batches.
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    MatrixView() = default;
    MatrixView(const double* d, std::size_t r, std::size_t c) : data(d), rows(r), cols(c) {}
    MatrixView(const std::vector<double>& v, std::size_t c)
        : data(v.data()), rows(c == 0 ? 0 : v.size() / c), cols(c) {}

    std::span<const double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

struct ForwardOutput {
    std::size_t rows = 0;
    std::size_t num_classes = 0;
    std::vector<double> task_probs;      // rows x C
    std::vector<double> detector_probs;  // rows x 2C, class j at columns (2j, 2j+1)

    double task_prob(std::size_t r, std::size_t c) const {
        return task_probs[r * num_classes + c];
    }
    double det_inlier(std::size_t r, std::size_t j) const {
        return detector_probs[r * 2 * num_classes + 2 * j];
    }
    double det_outlier(std::size_t r, std::size_t j) const {
        return detector_probs[r * 2 * num_classes + 2 * j + 1];
    }
    std::span<const double> task_row(std::size_t r) const {
        return {task_probs.data() + r * num_classes, num_classes};
    }
};

enum class LossKind { task, ova, cons, ent, pseu };

// Names one loss from the training objective together with its batch-level
// inputs. `labels` is used by task/ova/pseu; `twin` carries the
// weak-augmented twin batch for the consistency loss.
struct LossSpec {
    LossKind kind = LossKind::task;
    std::vector<int> labels;
    MatrixView twin;

    static LossSpec task_loss(std::vector<int> labels);
    static LossSpec ova_loss(std::vector<int> labels);
    static LossSpec cons_loss(MatrixView twin);
    static LossSpec ent_loss();
    static LossSpec pseu_loss(std::vector<int> pseudo_labels);
};

struct BackwardResult {
    double loss = 0.0;
    std::vector<double> grad;  // aligned index-by-index with params
};

// Deterministic fan-in scaled uniform init, zero biases.
ModelState init_model(const ModelConfig& config);

ForwardOutput forward(const ModelState& state, MatrixView batch);

BackwardResult backward(const ModelState& state, MatrixView batch, const LossSpec& spec);

// In-place momentum SGD update; increments step_count. Throws on
// non-finite gradients or a non-finite resulting parameter.
void sgd_step(ModelState& state, const std::vector<double>& grad, double lr, double momentum);

}  // namespace synq::nn
