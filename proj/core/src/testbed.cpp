#include "synq/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "synq/rng.hpp"

namespace synq::testbed {

namespace {

constexpr std::uint64_t kCenterTag = 0x63656e74;   // mixture geometry stream
constexpr std::uint64_t kModeKeepTag = 0x6b656570;  // generator mode-dropout stream

std::vector<double> unit_vector(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (auto& e : v) {
            e = rng.normal();
            norm2 += e * e;
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : v) e *= inv;
    return v;
}

// All centers for (class, mode); deterministic in spec.seed alone.
std::vector<std::vector<double>> all_centers(const RealSpec& spec) {
    Rng rng(derive_seed(spec.seed, kCenterTag));
    std::vector<std::vector<double>> centers(spec.num_classes * spec.modes_per_class);
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        const std::vector<double> dir = unit_vector(rng, spec.feature_dim);
        for (std::size_t k = 0; k < spec.modes_per_class; ++k) {
            const std::vector<double> jitter = unit_vector(rng, spec.feature_dim);
            std::vector<double> center(spec.feature_dim);
            for (std::size_t i = 0; i < spec.feature_dim; ++i)
                center[i] = spec.mode_separation * (dir[i] + 0.5 * jitter[i]);
            centers[c * spec.modes_per_class + k] = std::move(center);
        }
    }
    return centers;
}

// Modes kept per covered class after dropout (seeded permutation, at least one).
std::vector<std::vector<int>> kept_modes(const GeneratorSpec& gen) {
    const std::size_t K = gen.base.modes_per_class;
    const std::size_t dropped =
        static_cast<std::size_t>(std::floor(gen.mode_dropout * static_cast<double>(K) + 1e-12));
    const std::size_t keep = std::max<std::size_t>(1, K - dropped);
    std::vector<std::vector<int>> kept(gen.base.num_classes);
    Rng rng(derive_seed(gen.seed, kModeKeepTag));
    for (std::size_t c = 0; c < gen.base.num_classes; ++c) {
        std::vector<int> order(K);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        kept[c].assign(order.begin(), order.begin() + keep);
        std::sort(kept[c].begin(), kept[c].end());
    }
    return kept;
}

}  // namespace

void RealSpec::validate() const {
    if (num_classes < 2) throw std::invalid_argument("RealSpec: num_classes must be >= 2");
    if (feature_dim < 2) throw std::invalid_argument("RealSpec: feature_dim must be >= 2");
    if (modes_per_class < 1) throw std::invalid_argument("RealSpec: modes_per_class must be >= 1");
    if (mode_separation <= 0.0) throw std::invalid_argument("RealSpec: mode_separation must be > 0");
    if (within_mode_std <= 0.0) throw std::invalid_argument("RealSpec: within_mode_std must be > 0");
    if (!class_prior.empty()) {
        if (class_prior.size() != num_classes)
            throw std::invalid_argument("RealSpec: class_prior length != num_classes");
        double sum = 0.0;
        for (double p : class_prior) {
            if (p < 0.0) throw std::invalid_argument("RealSpec: class_prior entries must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("RealSpec: class_prior must sum to 1");
    }
}

std::vector<double> RealSpec::prior() const {
    if (!class_prior.empty()) return class_prior;
    return std::vector<double>(num_classes, 1.0 / static_cast<double>(num_classes));
}

void GeneratorSpec::validate() const {
    base.validate();
    if (affinity_noise_std < 0.0)
        throw std::invalid_argument("GeneratorSpec: affinity_noise_std must be >= 0");
    if (label_corruption_rate < 0.0 || label_corruption_rate > 1.0)
        throw std::invalid_argument("GeneratorSpec: label_corruption_rate must be in [0, 1]");
    if (mode_dropout < 0.0 || mode_dropout > 1.0)
        throw std::invalid_argument("GeneratorSpec: mode_dropout must be in [0, 1]");
    if (class_coverage.empty())
        throw std::invalid_argument("GeneratorSpec: class_coverage must be non-empty");
    for (int c : class_coverage)
        if (c < 0 || static_cast<std::size_t>(c) >= base.num_classes)
            throw std::invalid_argument("GeneratorSpec: class_coverage entry out of range");
}

void Dataset::append(std::span<const double> x, int condition, int latent, Source src) {
    if (feature_dim == 0) feature_dim = x.size();
    if (x.size() != feature_dim) throw std::invalid_argument("Dataset: feature width mismatch");
    features.insert(features.end(), x.begin(), x.end());
    conditions.push_back(condition);
    latents.push_back(latent);
    sources.push_back(src);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.feature_dim = feature_dim;
    out.split = split;
    out.features.reserve(indices.size() * feature_dim);
    for (std::size_t i : indices) out.append(row(i), conditions[i], latents[i], sources[i]);
    return out;
}

std::vector<double> mode_center(const RealSpec& spec, int cls, int mode) {
    spec.validate();
    if (cls < 0 || static_cast<std::size_t>(cls) >= spec.num_classes ||
        mode < 0 || static_cast<std::size_t>(mode) >= spec.modes_per_class)
        throw std::invalid_argument("mode_center: class or mode out of range");
    return all_centers(spec)[static_cast<std::size_t>(cls) * spec.modes_per_class + mode];
}

Dataset make_real_dataset(const RealSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("make_real_dataset: n must be >= 1");
    const auto centers = all_centers(spec);
    const auto prior = spec.prior();
    Rng rng(derive_seed(seed, spec.seed));
    Dataset ds;
    ds.feature_dim = spec.feature_dim;
    ds.features.reserve(n * spec.feature_dim);
    std::vector<double> x(spec.feature_dim);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = rng.categorical(prior);
        const std::size_t mode = rng.index(spec.modes_per_class);
        const auto& center = centers[static_cast<std::size_t>(cls) * spec.modes_per_class + mode];
        for (std::size_t d = 0; d < spec.feature_dim; ++d)
            x[d] = center[d] + spec.within_mode_std * rng.normal();
        ds.append(x, cls, cls, Source::real);
    }
    return ds;
}

Dataset sample_synthetic(const GeneratorSpec& gen, std::size_t n, std::uint64_t seed) {
    gen.validate();
    if (n < 1) throw std::invalid_argument("sample_synthetic: n must be >= 1");
    const auto& spec = gen.base;
    const auto centers = all_centers(spec);
    const auto kept = kept_modes(gen);
    const auto full_prior = spec.prior();

    // prior restricted to covered classes
    std::vector<int> covered = gen.class_coverage;
    std::sort(covered.begin(), covered.end());
    covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
    std::vector<double> covered_prior(covered.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < covered.size(); ++i) mass += full_prior[covered[i]];
    if (mass <= 0.0)
        throw std::invalid_argument("sample_synthetic: covered classes have zero prior mass");
    for (std::size_t i = 0; i < covered.size(); ++i)
        covered_prior[i] = full_prior[covered[i]] / mass;

    Rng rng(derive_seed(seed, gen.seed));
    Dataset ds;
    ds.feature_dim = spec.feature_dim;
    ds.features.reserve(n * spec.feature_dim);
    std::vector<double> x(spec.feature_dim);
    const int C = static_cast<int>(spec.num_classes);
    for (std::size_t i = 0; i < n; ++i) {
        const int latent = covered[rng.categorical(covered_prior)];
        const auto& modes = kept[latent];
        const int mode = modes[rng.index(modes.size())];
        const auto& center = centers[static_cast<std::size_t>(latent) * spec.modes_per_class + mode];
        for (std::size_t d = 0; d < spec.feature_dim; ++d)
            x[d] = center[d] + spec.within_mode_std * rng.normal() +
                   gen.affinity_noise_std * rng.normal();
        int condition;
        if (!gen.conditional) {
            condition = rng.categorical(full_prior);
        } else {
            condition = latent;
            if (gen.label_corruption_rate > 0.0 && rng.uniform() < gen.label_corruption_rate) {
                const int k = static_cast<int>(rng.index(C - 1));
                condition = k >= latent ? k + 1 : k;
            }
        }
        ds.append(x, condition, latent, Source::synthetic);
    }
    return ds;
}

std::vector<double> augment_weak(std::span<const double> x, double noise_std,
                                 std::uint64_t seed) {
    if (noise_std < 0.0) throw std::invalid_argument("augment_weak: noise_std must be >= 0");
    std::vector<double> out(x.begin(), x.end());
    if (noise_std == 0.0) return out;
    Rng rng(seed);
    for (auto& v : out) v += noise_std * rng.normal();
    return out;
}

std::vector<double> augment_strong(std::span<const double> x, const StrongAugParams& params,
                                   std::uint64_t seed) {
    if (params.scale_half_range < 0.0)
        throw std::invalid_argument("augment_strong: scale_half_range must be >= 0");
    if (params.mask_fraction < 0.0 || params.mask_fraction >= 1.0)
        throw std::invalid_argument("augment_strong: mask_fraction must be in [0, 1)");
    Rng rng(seed);
    const double scale =
        rng.uniform(1.0 - params.scale_half_range, 1.0 + params.scale_half_range);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
    const std::size_t count = static_cast<std::size_t>(
        std::llround(params.mask_fraction * static_cast<double>(x.size())));
    // partial Fisher-Yates to pick `count` distinct coordinates
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.index(idx.size() - i);
        std::swap(idx[i], idx[j]);
        out[idx[i]] = 0.0;
    }
    return out;
}

}  // namespace synq::testbed
