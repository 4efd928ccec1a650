#include "synq/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "synq/rng.hpp"

namespace synq::nn {

namespace {

struct LinearBlock {
    std::size_t w_off, b_off, in, out;
};

// Hidden layers first, then task head, then detector head (2C outputs).
std::vector<LinearBlock> layout(const ModelConfig& cfg) {
    std::vector<LinearBlock> blocks;
    std::size_t off = 0;
    std::size_t in = cfg.input_dim;
    for (std::size_t h : cfg.hidden_dims) {
        blocks.push_back({off, off + in * h, in, h});
        off += in * h + h;
        in = h;
    }
    blocks.push_back({off, off + in * cfg.num_classes, in, cfg.num_classes});
    off += in * cfg.num_classes + cfg.num_classes;
    blocks.push_back({off, off + in * 2 * cfg.num_classes, in, 2 * cfg.num_classes});
    return blocks;
}

struct Activations {
    // act[0] = input batch, act[l+1] = post-ReLU output of hidden layer l
    std::vector<std::vector<double>> act;
    // pre[l] = pre-activation of hidden layer l (for the ReLU mask)
    std::vector<std::vector<double>> pre;
    std::vector<double> task_logits;  // B x C
    std::vector<double> det_logits;   // B x 2C
};

void linear(const std::vector<double>& params, const LinearBlock& blk,
            const std::vector<double>& in, std::size_t rows, std::vector<double>& out) {
    out.assign(rows * blk.out, 0.0);
    const double* w = params.data() + blk.w_off;
    const double* b = params.data() + blk.b_off;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* x = in.data() + r * blk.in;
        double* y = out.data() + r * blk.out;
        for (std::size_t o = 0; o < blk.out; ++o) {
            double acc = b[o];
            const double* wrow = w + o * blk.in;
            for (std::size_t i = 0; i < blk.in; ++i) acc += wrow[i] * x[i];
            y[o] = acc;
        }
    }
}

Activations run_forward(const ModelState& state, MatrixView batch) {
    const auto& cfg = state.config;
    if (batch.cols != cfg.input_dim)
        throw std::invalid_argument("forward: batch width " + std::to_string(batch.cols) +
                                    " != input_dim " + std::to_string(cfg.input_dim));
    const auto blocks = layout(cfg);
    const std::size_t nh = cfg.hidden_dims.size();

    Activations a;
    a.act.resize(nh + 1);
    a.pre.resize(nh);
    a.act[0].assign(batch.data, batch.data + batch.rows * batch.cols);
    for (std::size_t l = 0; l < nh; ++l) {
        linear(state.params, blocks[l], a.act[l], batch.rows, a.pre[l]);
        a.act[l + 1] = a.pre[l];
        for (double& v : a.act[l + 1]) v = v > 0.0 ? v : 0.0;
    }
    linear(state.params, blocks[nh], a.act[nh], batch.rows, a.task_logits);
    linear(state.params, blocks[nh + 1], a.act[nh], batch.rows, a.det_logits);
    return a;
}

ForwardOutput probs_from_logits(const Activations& a, std::size_t rows, std::size_t C) {
    ForwardOutput out;
    out.rows = rows;
    out.num_classes = C;
    out.task_probs.resize(rows * C);
    out.detector_probs.resize(rows * 2 * C);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* t = a.task_logits.data() + r * C;
        double mx = t[0];
        for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, t[c]);
        double z = 0.0;
        for (std::size_t c = 0; c < C; ++c) z += std::exp(t[c] - mx);
        for (std::size_t c = 0; c < C; ++c) out.task_probs[r * C + c] = std::exp(t[c] - mx) / z;

        const double* d = a.det_logits.data() + r * 2 * C;
        for (std::size_t j = 0; j < C; ++j) {
            const double m = std::max(d[2 * j], d[2 * j + 1]);
            const double ei = std::exp(d[2 * j] - m);
            const double eo = std::exp(d[2 * j + 1] - m);
            out.detector_probs[r * 2 * C + 2 * j] = ei / (ei + eo);
            out.detector_probs[r * 2 * C + 2 * j + 1] = eo / (ei + eo);
        }
    }
    return out;
}

// log(1 + exp(x)) without overflow
double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

void check_labels(const std::vector<int>& labels, std::size_t rows, std::size_t C,
                  const char* loss_name) {
    if (labels.size() != rows)
        throw std::invalid_argument(std::string(loss_name) + ": labels size != batch rows");
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= C)
            throw std::invalid_argument(std::string(loss_name) + ": label out of range");
}

// Accumulates parameter gradients for one forward branch given the
// gradients on its head logits.
void backprop(const ModelState& state, const Activations& a, std::size_t rows,
              const std::vector<double>& d_task, const std::vector<double>& d_det,
              std::vector<double>& grad) {
    const auto& cfg = state.config;
    const auto blocks = layout(cfg);
    const std::size_t nh = cfg.hidden_dims.size();
    const LinearBlock& tb = blocks[nh];
    const LinearBlock& db = blocks[nh + 1];

    const std::vector<double>& last = a.act[nh];
    std::vector<double> d_act(rows * tb.in, 0.0);

    for (std::size_t r = 0; r < rows; ++r) {
        const double* x = last.data() + r * tb.in;
        const double* dt = d_task.data() + r * tb.out;
        const double* dd = d_det.data() + r * db.out;
        double* dx = d_act.data() + r * tb.in;
        for (std::size_t o = 0; o < tb.out; ++o) {
            const double g = dt[o];
            if (g == 0.0) continue;
            double* wg = grad.data() + tb.w_off + o * tb.in;
            const double* w = state.params.data() + tb.w_off + o * tb.in;
            for (std::size_t i = 0; i < tb.in; ++i) {
                wg[i] += g * x[i];
                dx[i] += g * w[i];
            }
            grad[tb.b_off + o] += g;
        }
        for (std::size_t o = 0; o < db.out; ++o) {
            const double g = dd[o];
            if (g == 0.0) continue;
            double* wg = grad.data() + db.w_off + o * db.in;
            const double* w = state.params.data() + db.w_off + o * db.in;
            for (std::size_t i = 0; i < db.in; ++i) {
                wg[i] += g * x[i];
                dx[i] += g * w[i];
            }
            grad[db.b_off + o] += g;
        }
    }

    for (std::size_t l = nh; l-- > 0;) {
        const LinearBlock& blk = blocks[l];
        const std::vector<double>& input = a.act[l];
        const std::vector<double>& pre = a.pre[l];
        std::vector<double> d_prev(rows * blk.in, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* x = input.data() + r * blk.in;
            const double* z = pre.data() + r * blk.out;
            const double* da = d_act.data() + r * blk.out;
            double* dp = d_prev.data() + r * blk.in;
            for (std::size_t o = 0; o < blk.out; ++o) {
                if (z[o] <= 0.0) continue;  // ReLU mask
                const double g = da[o];
                if (g == 0.0) continue;
                double* wg = grad.data() + blk.w_off + o * blk.in;
                const double* w = state.params.data() + blk.w_off + o * blk.in;
                for (std::size_t i = 0; i < blk.in; ++i) {
                    wg[i] += g * x[i];
                    dp[i] += g * w[i];
                }
                grad[blk.b_off + o] += g;
            }
        }
        d_act = std::move(d_prev);
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (num_classes < 2) throw std::invalid_argument("ModelConfig: num_classes must be >= 2");
    if (input_dim < 1) throw std::invalid_argument("ModelConfig: input_dim must be >= 1");
    for (std::size_t h : hidden_dims)
        if (h < 1) throw std::invalid_argument("ModelConfig: hidden dims must be >= 1");
}

std::size_t ModelConfig::param_count() const {
    std::size_t total = 0;
    for (const auto& blk : layout(*this)) total += blk.in * blk.out + blk.out;
    return total;
}

LossSpec LossSpec::task_loss(std::vector<int> labels) {
    return {LossKind::task, std::move(labels), {}};
}
LossSpec LossSpec::ova_loss(std::vector<int> labels) {
    return {LossKind::ova, std::move(labels), {}};
}
LossSpec LossSpec::cons_loss(MatrixView twin) { return {LossKind::cons, {}, twin}; }
LossSpec LossSpec::ent_loss() { return {LossKind::ent, {}, {}}; }
LossSpec LossSpec::pseu_loss(std::vector<int> pseudo_labels) {
    return {LossKind::pseu, std::move(pseudo_labels), {}};
}

ModelState init_model(const ModelConfig& config) {
    config.validate();
    ModelState state;
    state.config = config;
    state.params.assign(config.param_count(), 0.0);
    state.velocity.assign(state.params.size(), 0.0);
    Rng rng(derive_seed(config.seed, 0x696e6974));
    for (const auto& blk : layout(config)) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(blk.in));
        for (std::size_t k = 0; k < blk.in * blk.out; ++k)
            state.params[blk.w_off + k] = rng.uniform(-bound, bound);
        // biases stay zero
    }
    return state;
}

ForwardOutput forward(const ModelState& state, MatrixView batch) {
    const Activations a = run_forward(state, batch);
    return probs_from_logits(a, batch.rows, state.config.num_classes);
}

BackwardResult backward(const ModelState& state, MatrixView batch, const LossSpec& spec) {
    const auto& cfg = state.config;
    const std::size_t C = cfg.num_classes;
    const std::size_t B = batch.rows;
    if (B == 0) throw std::invalid_argument("backward: empty batch");

    const Activations a = run_forward(state, batch);
    const ForwardOutput out = probs_from_logits(a, B, C);

    BackwardResult res;
    res.grad.assign(state.params.size(), 0.0);
    std::vector<double> d_task(B * C, 0.0);
    std::vector<double> d_det(B * 2 * C, 0.0);
    const double invB = 1.0 / static_cast<double>(B);

    switch (spec.kind) {
        case LossKind::task:
        case LossKind::pseu: {
            const char* name = spec.kind == LossKind::task ? "l_task" : "l_pseu";
            check_labels(spec.labels, B, C, name);
            double loss = 0.0;
            for (std::size_t r = 0; r < B; ++r) {
                const int y = spec.labels[r];
                const double* t = a.task_logits.data() + r * C;
                double mx = t[0];
                for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, t[c]);
                double z = 0.0;
                for (std::size_t c = 0; c < C; ++c) z += std::exp(t[c] - mx);
                loss += (std::log(z) + mx) - t[y];
                for (std::size_t c = 0; c < C; ++c) {
                    d_task[r * C + c] =
                        (out.task_prob(r, c) - (static_cast<int>(c) == y ? 1.0 : 0.0)) * invB;
                }
            }
            res.loss = loss * invB;
            break;
        }
        case LossKind::ova: {
            check_labels(spec.labels, B, C, "l_ova");
            if (C < 2) throw std::invalid_argument("l_ova: needs num_classes >= 2");
            double loss = 0.0;
            for (std::size_t r = 0; r < B; ++r) {
                const std::size_t y = static_cast<std::size_t>(spec.labels[r]);
                const double* d = a.det_logits.data() + r * 2 * C;
                // hardest negative: smallest p_outlier among j != y
                std::size_t jstar = y == 0 ? 1 : 0;
                double best = out.det_outlier(r, jstar);
                for (std::size_t j = 0; j < C; ++j) {
                    if (j == y) continue;
                    if (out.det_outlier(r, j) < best) {
                        best = out.det_outlier(r, j);
                        jstar = j;
                    }
                }
                // -log p_in(y) = softplus(a_out - a_in), -log p_out(j*) likewise
                loss += softplus(d[2 * y + 1] - d[2 * y]);
                loss += softplus(d[2 * jstar] - d[2 * jstar + 1]);
                d_det[r * 2 * C + 2 * y] += (out.det_inlier(r, y) - 1.0) * invB;
                d_det[r * 2 * C + 2 * y + 1] += out.det_outlier(r, y) * invB;
                d_det[r * 2 * C + 2 * jstar] += out.det_inlier(r, jstar) * invB;
                d_det[r * 2 * C + 2 * jstar + 1] += (out.det_outlier(r, jstar) - 1.0) * invB;
            }
            res.loss = loss * invB;
            break;
        }
        case LossKind::cons: {
            if (spec.twin.rows != B || spec.twin.cols != batch.cols)
                throw std::invalid_argument("l_cons: twin batch shape mismatch");
            const Activations at = run_forward(state, spec.twin);
            const ForwardOutput ot = probs_from_logits(at, B, C);
            std::vector<double> d_task_t(B * C, 0.0);
            std::vector<double> d_det_t(B * 2 * C, 0.0);
            double loss = 0.0;
            for (std::size_t r = 0; r < B; ++r) {
                // task probability vectors, squared L2
                double dot = 0.0, dot_t = 0.0;
                for (std::size_t c = 0; c < C; ++c) {
                    const double diff = out.task_prob(r, c) - ot.task_prob(r, c);
                    loss += diff * diff;
                }
                for (std::size_t c = 0; c < C; ++c) {
                    const double g = 2.0 * (out.task_prob(r, c) - ot.task_prob(r, c));
                    dot += g * out.task_prob(r, c);
                    dot_t += g * ot.task_prob(r, c);
                }
                for (std::size_t c = 0; c < C; ++c) {
                    const double g = 2.0 * (out.task_prob(r, c) - ot.task_prob(r, c));
                    d_task[r * C + c] = out.task_prob(r, c) * (g - dot) * invB;
                    d_task_t[r * C + c] = -ot.task_prob(r, c) * (g - dot_t) * invB;
                }
                // detector pairs, squared L2 within each 2-way softmax
                for (std::size_t j = 0; j < C; ++j) {
                    const double pi = out.det_inlier(r, j), po = out.det_outlier(r, j);
                    const double qi = ot.det_inlier(r, j), qo = ot.det_outlier(r, j);
                    loss += (pi - qi) * (pi - qi) + (po - qo) * (po - qo);
                    const double gi = 2.0 * (pi - qi), go = 2.0 * (po - qo);
                    const double pd = gi * pi + go * po;
                    const double qd = gi * qi + go * qo;
                    d_det[r * 2 * C + 2 * j] += pi * (gi - pd) * invB;
                    d_det[r * 2 * C + 2 * j + 1] += po * (go - pd) * invB;
                    d_det_t[r * 2 * C + 2 * j] += -qi * (gi - qd) * invB;
                    d_det_t[r * 2 * C + 2 * j + 1] += -qo * (go - qd) * invB;
                }
            }
            res.loss = loss * invB;
            backprop(state, at, B, d_task_t, d_det_t, res.grad);
            break;
        }
        case LossKind::ent: {
            double loss = 0.0;
            for (std::size_t r = 0; r < B; ++r) {
                const double* d = a.det_logits.data() + r * 2 * C;
                for (std::size_t j = 0; j < C; ++j) {
                    const double pi = out.det_inlier(r, j), po = out.det_outlier(r, j);
                    const double m = std::max(d[2 * j], d[2 * j + 1]);
                    const double lse =
                        m + std::log(std::exp(d[2 * j] - m) + std::exp(d[2 * j + 1] - m));
                    loss += lse - pi * d[2 * j] - po * d[2 * j + 1];
                    const double slope = pi * po * (d[2 * j + 1] - d[2 * j]);
                    d_det[r * 2 * C + 2 * j] += slope * invB;
                    d_det[r * 2 * C + 2 * j + 1] += -slope * invB;
                }
            }
            res.loss = loss * invB;
            break;
        }
        default:
            throw std::invalid_argument("backward: unknown loss kind");
    }

    backprop(state, a, B, d_task, d_det, res.grad);
    return res;
}

void sgd_step(ModelState& state, const std::vector<double>& grad, double lr, double momentum) {
    if (grad.size() != state.params.size())
        throw std::invalid_argument("sgd_step: gradient length mismatch");
    if (lr < 0.0) throw std::invalid_argument("sgd_step: negative learning rate");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("sgd_step: momentum must be in [0, 1)");
    for (double g : grad)
        if (!std::isfinite(g))
            throw std::runtime_error("sgd_step: non-finite gradient at step " +
                                     std::to_string(state.step_count));
    for (std::size_t i = 0; i < state.params.size(); ++i) {
        state.velocity[i] = momentum * state.velocity[i] + grad[i];
        state.params[i] -= lr * state.velocity[i];
        if (!std::isfinite(state.params[i]))
            throw std::runtime_error("sgd_step: parameter became non-finite at step " +
                                     std::to_string(state.step_count));
    }
    ++state.step_count;
}

}  // namespace synq::nn
