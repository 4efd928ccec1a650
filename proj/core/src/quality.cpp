#include "synq/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "synq/rng.hpp"
#include "synq/supervised.hpp"

namespace synq::quality {

namespace {

double mean_margin(std::span<const MarginRecord> records) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.margin;
    return sum / static_cast<double>(records.size());
}

double js_from_normalized(const std::vector<double>& p, const std::vector<double>& q) {
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        // per-bin sum first: IEEE addition commutes, so js(p,q) == js(q,p) exactly
        const double tp = p[i] > 0.0 ? 0.5 * p[i] * std::log(p[i] / m) : 0.0;
        const double tq = q[i] > 0.0 ? 0.5 * q[i] * std::log(q[i] / m) : 0.0;
        js += tp + tq;
    }
    return js;
}

}  // namespace

std::size_t MarginDistribution::total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

std::vector<double> MarginDistribution::normalized() const {
    const double n = static_cast<double>(total());
    std::vector<double> p(counts.size(), 0.0);
    if (n == 0.0) return p;
    for (std::size_t i = 0; i < counts.size(); ++i)
        p[i] = static_cast<double>(counts[i]) / n;
    return p;
}

double margin(std::span<const double> probs, int label) {
    if (probs.size() < 2) throw std::invalid_argument("margin: need at least 2 classes");
    if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
        throw std::invalid_argument("margin: label out of range");
    double best_other = -1.0;
    for (std::size_t c = 0; c < probs.size(); ++c) {
        if (static_cast<int>(c) == label) continue;
        best_other = std::max(best_other, probs[c]);
    }
    return probs[label] - best_other;
}

std::vector<MarginRecord> collect_margins(const nn::ModelState& state,
                                          const testbed::Dataset& dataset, Role role,
                                          const std::set<int>* trained_classes) {
    if (dataset.feature_dim != state.config.input_dim)
        throw std::invalid_argument("collect_margins: dataset width != model input_dim");
    const nn::ForwardOutput out = nn::forward(state, dataset.view());
    std::vector<MarginRecord> records(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const int label = dataset.conditions[i];
        records[i].margin = margin(out.task_row(i), label);
        records[i].label = label;
        records[i].role = role;
        records[i].class_trained_flag =
            trained_classes == nullptr || trained_classes->count(label) > 0;
    }
    return records;
}

CalibrationResult calibrate(std::span<const MarginRecord> train,
                            std::span<const MarginRecord> standard_test,
                            std::span<const MarginRecord> test) {
    if (train.empty() || standard_test.empty() || test.empty())
        throw std::invalid_argument("calibrate: all three record sets must be non-empty");
    CalibrationResult result;
    result.offset = mean_margin(train) - mean_margin(standard_test);
    result.calibrated.assign(test.begin(), test.end());
    for (auto& r : result.calibrated)
        r.margin = std::clamp(r.margin + result.offset, -1.0, 1.0);
    return result;
}

MarginDistribution histogram(std::span<const MarginRecord> records, std::size_t bins) {
    if (records.empty()) throw std::invalid_argument("histogram: empty record set");
    if (bins == 0) throw std::invalid_argument("histogram: bins must be >= 1");
    MarginDistribution dist;
    dist.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        dist.bin_edges[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(bins);
    dist.counts.assign(bins, 0);
    for (const auto& r : records) {
        const double pos = (r.margin + 1.0) / 2.0 * static_cast<double>(bins);
        std::size_t b = static_cast<std::size_t>(std::floor(pos));
        if (b >= bins) b = bins - 1;  // margin == +1 lands in the last bin
        ++dist.counts[b];
    }
    dist.mean = mean_margin(records);
    return dist;
}

double js_divergence(const MarginDistribution& p, const MarginDistribution& q) {
    if (p.bin_edges != q.bin_edges)
        throw std::invalid_argument("js_divergence: bin edges differ");
    if (p.total() == 0 || q.total() == 0)
        throw std::invalid_argument("js_divergence: empty distribution");
    return js_from_normalized(p.normalized(), q.normalized());
}

StandardSplit standard_split(std::size_t n, double fraction, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("standard_split: need at least 2 samples");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x73706c6974));
    rng.shuffle(order);
    std::size_t hold = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(n)));
    hold = std::clamp<std::size_t>(hold, 1, n - 1);
    StandardSplit split;
    split.standard_test_indices.assign(order.begin(), order.begin() + hold);
    split.train_indices.assign(order.begin() + hold, order.end());
    return split;
}

namespace {

// Shared core of tr_quality / ts_quality: fit a task model on `train_set`,
// calibrate `test_set` margins against the held-in standard-test slice and
// score with JS against the train-margin reference.
QualityPart margin_quality(const testbed::Dataset& train_set, const testbed::Dataset& test_set,
                           const nn::ModelConfig& model_config, const TrainConfig& train_config,
                           const std::set<int>& trained_classes, std::size_t bins) {
    if (train_set.size() < 2)
        throw std::invalid_argument("quality: training set needs at least 2 samples");
    if (test_set.size() == 0) throw std::invalid_argument("quality: empty test set");

    const StandardSplit split =
        standard_split(train_set.size(), train_config.standard_test_fraction, train_config.seed);
    const testbed::Dataset fit_set = train_set.subset(split.train_indices);
    const testbed::Dataset standard_set = train_set.subset(split.standard_test_indices);

    const nn::ModelState model = fit_supervised(fit_set, model_config, train_config);

    const auto train_records = collect_margins(model, fit_set, Role::train, &trained_classes);
    const auto standard_records =
        collect_margins(model, standard_set, Role::standard_test, &trained_classes);
    const auto test_records = collect_margins(model, test_set, Role::test, &trained_classes);

    const CalibrationResult cal = calibrate(train_records, standard_records, test_records);

    QualityPart part;
    part.model = model;
    part.offset = cal.offset;
    part.n_train = train_records.size();
    part.n_test = test_records.size();
    part.train_hist = histogram(train_records, bins);
    part.test_hist = histogram(cal.calibrated, bins);
    part.test_hist.calibration_offset = cal.offset;
    part.js = js_divergence(part.train_hist, part.test_hist);
    part.js_uncalibrated = js_divergence(part.train_hist, histogram(test_records, bins));

    // per-class score against the overall train reference; classes absent
    // from the test set are skipped
    std::map<int, std::vector<MarginRecord>> by_class;
    for (const auto& r : cal.calibrated) by_class[r.label].push_back(r);
    for (const auto& [cls, records] : by_class)
        part.per_class_js[cls] = js_divergence(part.train_hist, histogram(records, bins));
    return part;
}

std::set<int> classes_present(const testbed::Dataset& ds) {
    std::set<int> classes;
    for (int c : ds.conditions) classes.insert(c);
    return classes;
}

}  // namespace

QualityPart tr_quality(const testbed::Dataset& real_train, const testbed::Dataset& synthetic,
                       const nn::ModelConfig& model_config, const TrainConfig& train_config,
                       std::size_t bins) {
    return margin_quality(real_train, synthetic, model_config, train_config,
                          classes_present(real_train), bins);
}

QualityPart ts_quality(const testbed::Dataset& synthetic, const testbed::Dataset& real_test,
                       const nn::ModelConfig& model_config, const TrainConfig& train_config,
                       std::size_t bins) {
    return margin_quality(synthetic, real_test, model_config, train_config,
                          classes_present(synthetic), bins);
}

Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("pearson: need at least 3 points");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: zero variance input");
    Correlation c;
    c.r = sxy / std::sqrt(sxx * syy);
    c.r = std::clamp(c.r, -1.0, 1.0);
    const double denom = 1.0 - c.r * c.r;
    c.t_stat = denom <= 0.0 ? std::numeric_limits<double>::infinity()
                            : c.r * std::sqrt(static_cast<double>(n - 2) / denom);
    return c;
}

}  // namespace synq::quality
