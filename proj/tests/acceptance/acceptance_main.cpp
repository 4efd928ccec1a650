// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. An optional argv selects a single criterion id for focused runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "synq/baselines.hpp"
#include "synq/bayes.hpp"
#include "synq/experiment.hpp"
#include "synq/quality.hpp"
#include "synq/rng.hpp"
#include "synq/supervised.hpp"
#include "synq/syncheck.hpp"
#include "synq/testbed.hpp"

using namespace synq;
using experiment::default_config;
using experiment::ExperimentConfig;
using experiment::generate;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// criterion 1: gradient correctness
// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
    const nn::LossKind kinds[] = {nn::LossKind::task, nn::LossKind::ova, nn::LossKind::cons,
                                  nn::LossKind::ent, nn::LossKind::pseu};
    const double h = 1e-5;
    double worst = 0.0;
    std::size_t accepted = 0;
    std::uint64_t attempt = 0;
    while (accepted < 20 && attempt < 400) {
        ++attempt;
        Rng rng(derive_seed(0xacc1, attempt));
        nn::ModelConfig cfg;
        cfg.input_dim = 2 + rng.index(6);
        if (rng.uniform() < 0.8) cfg.hidden_dims = {2 + rng.index(10)};
        cfg.num_classes = 2 + rng.index(3);
        cfg.seed = rng.next_u64();
        if (cfg.param_count() > 500) continue;
        const std::size_t rows = 2 + rng.index(5);
        std::vector<double> x(rows * cfg.input_dim);
        for (auto& v : x) v = rng.normal();
        const nn::MatrixView view(x.data(), rows, cfg.input_dim);
        const nn::ModelState state = nn::init_model(cfg);

        // keep away from OVA argmin ties (the loss is non-smooth there)
        const auto out = nn::forward(state, view);
        bool smooth = true;
        for (std::size_t r = 0; r < rows && smooth; ++r) {
            std::vector<double> outs;
            for (std::size_t j = 0; j < cfg.num_classes; ++j)
                outs.push_back(out.det_outlier(r, j));
            std::sort(outs.begin(), outs.end());
            if (outs[1] - outs[0] < 1e-3) smooth = false;
        }
        if (!smooth) continue;

        std::vector<int> labels(rows);
        for (auto& y : labels) y = static_cast<int>(rng.index(cfg.num_classes));
        std::vector<double> twin = x;
        for (auto& v : twin) v += 0.3 * rng.normal();

        nn::LossSpec spec;
        switch (kinds[accepted % 5]) {
            case nn::LossKind::task: spec = nn::LossSpec::task_loss(labels); break;
            case nn::LossKind::ova: spec = nn::LossSpec::ova_loss(labels); break;
            case nn::LossKind::cons:
                spec = nn::LossSpec::cons_loss(nn::MatrixView(twin.data(), rows, cfg.input_dim));
                break;
            case nn::LossKind::ent: spec = nn::LossSpec::ent_loss(); break;
            case nn::LossKind::pseu: spec = nn::LossSpec::pseu_loss(labels); break;
        }

        const auto analytic = nn::backward(state, view, spec);
        nn::ModelState probe = state;
        for (std::size_t i = 0; i < probe.params.size(); ++i) {
            const double keep = probe.params[i];
            probe.params[i] = keep + h;
            const double up = nn::backward(probe, view, spec).loss;
            probe.params[i] = keep - h;
            const double down = nn::backward(probe, view, spec).loss;
            probe.params[i] = keep;
            const double fd = (up - down) / (2.0 * h);
            const double err = std::abs(analytic.grad[i] - fd) /
                               std::max(1e-3, std::abs(analytic.grad[i]) + std::abs(fd));
            worst = std::max(worst, err);
        }
        ++accepted;
    }
    Outcome out;
    out.pass = accepted == 20 && worst < 1e-4;
    out.detail = "20 models, max rel err " + fmt(worst) + " < 1e-4";
    return out;
}

// ---------------------------------------------------------------------------
// criterion 2: appendix verification
// ---------------------------------------------------------------------------

Outcome appendix_verification() {
    const auto summary = bayes::run_verification(1000, 2025);
    Outcome out;
    out.pass = summary.all_hold() && summary.tv_bound_instances == 1000 &&
               summary.cond_tv_instances == 1000 && summary.lemma_instances >= 100;
    std::ostringstream detail;
    detail << "tv bound 0/" << summary.tv_bound_instances << " violations, conditional-tv 0/"
           << summary.cond_tv_instances << ", lemma " << summary.lemma_instances
           << " instances, worst slack " << fmt(summary.tv_bound_worst_slack);
    out.detail = detail.str();
    if (summary.tv_bound_violations || summary.cond_tv_violations || summary.lemma_violations ||
        summary.tstr_opt_violations)
        out.detail = "violations found: " + out.detail;
    return out;
}

// ---------------------------------------------------------------------------
// criterion 3: metric soundness
// ---------------------------------------------------------------------------

Outcome metric_soundness() {
    Rng rng(31337);
    // JS symmetry / bounds / zero-on-identical, exact
    for (int trial = 0; trial < 500; ++trial) {
        quality::MarginDistribution p, q;
        const std::size_t bins = 64;
        p.bin_edges.resize(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i)
            p.bin_edges[i] = -1.0 + 2.0 * static_cast<double>(i) / bins;
        q.bin_edges = p.bin_edges;
        p.counts.assign(bins, 0);
        q.counts.assign(bins, 0);
        for (std::size_t i = 0; i < bins; ++i) {
            p.counts[i] = rng.index(40);
            q.counts[i] = rng.index(40);
        }
        p.counts[rng.index(bins)] += 1;
        q.counts[rng.index(bins)] += 1;
        const double pq = quality::js_divergence(p, q);
        const double qp = quality::js_divergence(q, p);
        if (pq != qp) return {false, "JS symmetry violated"};
        if (pq < 0.0 || pq > std::log(2.0) + 1e-12) return {false, "JS out of [0, ln 2]"};
        if (quality::js_divergence(p, p) != 0.0) return {false, "JS(p,p) != 0"};
    }

    // calibration fixed point + margin bounds on a real training run
    testbed::RealSpec spec;
    spec.num_classes = 4;
    spec.feature_dim = 10;
    spec.seed = 3;
    const auto train = testbed::make_real_dataset(spec, 600, 5);
    TrainConfig tc;
    tc.epochs_total = 15;
    tc.warmup_epochs = 4;
    tc.seed = 5;
    const auto state = fit_supervised(train, nn::ModelConfig{10, {16}, 4, 5}, tc);

    const auto split = quality::standard_split(train.size(), 0.1, 5);
    const auto fit_set = train.subset(split.train_indices);
    const auto std_set = train.subset(split.standard_test_indices);
    const auto train_rec = quality::collect_margins(state, fit_set, quality::Role::train);
    const auto std_rec = quality::collect_margins(state, std_set, quality::Role::standard_test);
    for (const auto& r : train_rec)
        if (r.margin < -1.0 || r.margin > 1.0) return {false, "margin outside [-1, 1]"};

    const auto cal = quality::calibrate(train_rec, std_rec, std_rec);
    double mean_cal = 0.0, mean_train = 0.0;
    for (const auto& r : cal.calibrated) mean_cal += r.margin;
    mean_cal /= static_cast<double>(cal.calibrated.size());
    for (const auto& r : train_rec) mean_train += r.margin;
    mean_train /= static_cast<double>(train_rec.size());
    const double residual = std::abs(mean_cal - mean_train);
    if (residual > 1e-12)
        return {false, "calibration fixed point off by " + fmt(residual)};

    return {true, "JS exact on 500 histograms, calibration residual " + fmt(residual) +
                      " <= 1e-12, margins bounded"};
}

// ---------------------------------------------------------------------------
// criteria 4+5: metric/performance correlations
// ---------------------------------------------------------------------------

Outcome affinity_correlation() {
    // tight clusters and scarce real data, so the noise grid genuinely
    // degrades the mixture model instead of being absorbed
    ExperimentConfig cfg = default_config("custom");
    cfg.testbed.real.mode_separation = 1.4;
    cfg.testbed.real.within_mode_std = 0.35;
    cfg.testbed.n_real_train = 300;
    cfg.testbed.n_real_test = 2000;
    cfg.testbed.volume_percent = 200.0;
    cfg.hidden_dims = {32};
    const std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::vector<double> js_points, acc_points;
    for (double sigma : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
        ExperimentConfig point = cfg;
        point.testbed.affinity_noise_std = sigma;
        std::vector<double> js, acc;
        for (std::uint64_t seed : seeds) {
            const auto data = generate(point.testbed, seed);
            TrainConfig tc = point.train;
            tc.seed = seed;
            const auto mc = point.model_config(seed);
            js.push_back(quality::tr_quality(data.real_train, data.synthetic, mc, tc).js);
            acc.push_back(baselines::train_mixture(data.real_train, data.synthetic,
                                                   data.real_test, mc, tc)
                              .test_accuracy);
        }
        js_points.push_back(mean_of(js));
        acc_points.push_back(mean_of(acc));
    }
    const auto corr = quality::pearson(js_points, acc_points);
    Outcome out;
    out.pass = corr.r <= -0.7;
    out.detail = "pearson r = " + fmt(corr.r) + " (need <= -0.7) over noise grid {0 .. 0.5}";
    return out;
}

Outcome diversity_correlation() {
    ExperimentConfig cfg = default_config("custom");
    cfg.testbed.real.mode_separation = 2.0;
    cfg.testbed.real.within_mode_std = 0.6;
    cfg.testbed.n_real_train = 800;
    cfg.testbed.n_real_test = 2000;
    const std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::vector<double> js_points, acc_points;
    for (int pct = 10; pct <= 100; pct += 10) {
        ExperimentConfig point = cfg;
        point.testbed.volume_percent = pct;
        std::vector<double> js, acc;
        for (std::uint64_t seed : seeds) {
            const auto data = generate(point.testbed, seed);
            TrainConfig tc = point.train;
            tc.seed = seed;
            const auto mc = point.model_config(seed);
            const auto ts = quality::ts_quality(data.synthetic, data.real_test, mc, tc);
            js.push_back(ts.js);
            acc.push_back(baselines::evaluate_accuracy(ts.model, data.real_test));
        }
        js_points.push_back(mean_of(js));
        acc_points.push_back(mean_of(acc));
    }
    const auto corr = quality::pearson(js_points, acc_points);
    Outcome out;
    out.pass = corr.r <= -0.7;
    out.detail = "pearson r = " + fmt(corr.r) + " (need <= -0.7) over volume grid 10%..100%";
    return out;
}

// ---------------------------------------------------------------------------
// criteria 6..10: strategy-level properties on the presets
// ---------------------------------------------------------------------------

struct PresetMeans {
    double real_only = 0, mixture = 0, filter_trts = 0, syncheck = 0;
};

PresetMeans run_preset_strategies(const ExperimentConfig& cfg,
                                  const std::vector<std::uint64_t>& seeds) {
    std::vector<double> ro, mx, ft, sc;
    for (std::uint64_t seed : seeds) {
        const auto data = generate(cfg.testbed, seed);
        const auto mc = cfg.model_config(seed);
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        ro.push_back(
            baselines::train_real_only(data.real_train, data.real_test, mc, tc).test_accuracy);
        mx.push_back(baselines::train_mixture(data.real_train, data.synthetic, data.real_test,
                                              mc, tc)
                         .test_accuracy);
        const auto kept = baselines::filter_trts(data.real_train, data.synthetic, mc, tc);
        ft.push_back(baselines::train_mixture(data.real_train, kept, data.real_test, mc, tc)
                         .test_accuracy);
        const auto res =
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, tc, nullptr);
        sc.push_back(baselines::evaluate_accuracy(res.state, data.real_test));
    }
    return {mean_of(ro), mean_of(mx), mean_of(ft), mean_of(sc)};
}

Outcome strategy_ordering() {
    const ExperimentConfig cfg = default_config("in_domain");
    const PresetMeans m = run_preset_strategies(cfg, {1, 2, 3, 4, 5});
    Outcome out;
    out.pass = m.syncheck >= m.filter_trts && m.filter_trts >= m.mixture &&
               m.syncheck >= m.real_only + 0.02;
    out.detail = "syncheck " + fmt(m.syncheck) + " >= filter_trts " + fmt(m.filter_trts) +
                 " >= mixture " + fmt(m.mixture) + ", real_only " + fmt(m.real_only) +
                 " (+2pt gate)";
    return out;
}

Outcome degradation_rescue() {
    ExperimentConfig cfg = default_config("in_domain");
    cfg.testbed.volume_percent = 500.0;
    cfg.testbed.label_corruption_rate = 0.5;
    std::vector<double> ro, mx, sc;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const auto data = generate(cfg.testbed, seed);
        const auto mc = cfg.model_config(seed);
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        ro.push_back(
            baselines::train_real_only(data.real_train, data.real_test, mc, tc).test_accuracy);
        mx.push_back(baselines::train_mixture(data.real_train, data.synthetic, data.real_test,
                                              mc, tc)
                         .test_accuracy);
        const auto res =
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, tc, nullptr);
        sc.push_back(baselines::evaluate_accuracy(res.state, data.real_test));
    }
    Outcome out;
    const double ro_m = mean_of(ro), mx_m = mean_of(mx), sc_m = mean_of(sc);
    out.pass = mx_m < ro_m && sc_m >= ro_m - 0.01;
    out.detail = "at 500% volume, rho 0.5: mixture " + fmt(mx_m) + " < real_only " + fmt(ro_m) +
                 ", syncheck " + fmt(sc_m) + " >= real_only - 1pt";
    return out;
}

Outcome ablation_direction() {
    const ExperimentConfig cfg = default_config("cross_domain");
    std::vector<double> full, no_ova, no_unsup;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const auto data = generate(cfg.testbed, seed);
        const auto mc = cfg.model_config(seed);
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        full.push_back(baselines::evaluate_accuracy(
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, tc, nullptr).state,
            data.real_test));
        TrainConfig drop_ova = tc;
        drop_ova.ablate_ova = true;
        no_ova.push_back(baselines::evaluate_accuracy(
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, drop_ova, nullptr)
                .state,
            data.real_test));
        TrainConfig drop_unsup = tc;
        drop_unsup.ablate_cons_ent = true;
        no_unsup.push_back(baselines::evaluate_accuracy(
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, drop_unsup, nullptr)
                .state,
            data.real_test));
    }
    Outcome out;
    const double f = mean_of(full), a = mean_of(no_ova), b = mean_of(no_unsup);
    out.pass = a < f && b < f;
    out.detail = "full " + fmt(f) + " vs w/o ova " + fmt(a) + " vs w/o cons+ent " + fmt(b);
    return out;
}

Outcome quality_reevaluation() {
    Outcome out;
    out.pass = true;
    std::ostringstream detail;
    for (const char* preset : {"cross_domain", "in_domain"}) {
        const ExperimentConfig cfg = default_config(preset);
        const std::uint64_t seed = 11;
        const auto data = generate(cfg.testbed, seed);
        const auto mc = cfg.model_config(seed);
        TrainConfig tc = cfg.train;
        tc.seed = seed;

        const auto raw_tr = quality::tr_quality(data.real_train, data.synthetic, mc, tc);
        const auto raw_ts = quality::ts_quality(data.synthetic, data.real_test, mc, tc);
        const auto res =
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, tc, nullptr);
        const auto filtered = syncheck::export_filtered(data.synthetic, res.final_inliers);
        if (filtered.size() < 2) {
            out.pass = false;
            detail << preset << ": filtered set too small; ";
            continue;
        }
        const auto new_tr = quality::tr_quality(data.real_train, filtered, mc, tc);
        const auto new_ts = quality::ts_quality(filtered, data.real_test, mc, tc);
        const bool tr_better = new_tr.js < raw_tr.js;
        const bool ts_kept = new_ts.js <= raw_ts.js + 0.1;
        if (!tr_better || !ts_kept) out.pass = false;
        detail << preset << ": js_tr " << fmt(raw_tr.js) << " -> " << fmt(new_tr.js)
               << ", js_ts " << fmt(raw_ts.js) << " -> " << fmt(new_ts.js) << "; ";
    }
    out.detail = detail.str();
    return out;
}

Outcome filter_precision() {
    const ExperimentConfig cfg = default_config("in_domain");
    std::vector<double> precisions;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const auto data = generate(cfg.testbed, seed);
        const auto mc = cfg.model_config(seed);
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        const auto res =
            syncheck::train_syncheck(data.real_train, data.synthetic, mc, tc, nullptr);
        if (res.final_inliers.size() == 0) return {false, "empty inlier set"};
        std::size_t correct = 0;
        for (std::size_t k = 0; k < res.final_inliers.size(); ++k)
            if (res.final_inliers.pseudo_labels[k] ==
                data.synthetic.latents[res.final_inliers.indices[k]])
                ++correct;
        precisions.push_back(static_cast<double>(correct) / res.final_inliers.size());
    }
    const double mean_precision = mean_of(precisions);
    const double raw = 1.0 - cfg.testbed.label_corruption_rate;
    Outcome out;
    out.pass = mean_precision >= raw + 0.10;
    out.detail = "accepted pseudo-label accuracy " + fmt(mean_precision) +
                 " vs raw condition accuracy " + fmt(raw) + " (+10pt gate)";
    return out;
}

Outcome condition_blindness() {
    Outcome out;
    out.pass = true;
    std::ostringstream detail;
    for (const char* preset : {"cross_domain", "in_domain"}) {
        ExperimentConfig cfg = default_config(preset);
        cfg.testbed.n_real_train = std::min<std::size_t>(cfg.testbed.n_real_train, 400);
        cfg.testbed.n_real_test = 200;
        cfg.train.epochs_total = std::min<std::size_t>(cfg.train.epochs_total, 20);
        cfg.train.warmup_epochs = std::min<std::size_t>(cfg.train.warmup_epochs, 6);
        const auto data = generate(cfg.testbed, 17);
        const auto mc = cfg.model_config(17);
        TrainConfig tc = cfg.train;
        tc.seed = 17;

        testbed::Dataset permuted = data.synthetic;
        for (auto& c : permuted.conditions)
            c = (c + 1) % static_cast<int>(cfg.testbed.real.num_classes);

        const auto a = syncheck::train_syncheck(data.real_train, data.synthetic, mc, tc, nullptr);
        const auto b = syncheck::train_syncheck(data.real_train, permuted, mc, tc, nullptr);
        if (a.state.params != b.state.params) {
            out.pass = false;
            detail << preset << ": model differs after condition permutation; ";
        } else {
            detail << preset << ": bit-identical; ";
        }
    }
    out.detail = detail.str();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "gradient correctness", 30.0, gradient_correctness},
        {2, "appendix verification", 60.0, appendix_verification},
        {3, "metric soundness", 60.0, metric_soundness},
        {4, "affinity-metric correlation", 300.0, affinity_correlation},
        {5, "diversity-metric correlation", 300.0, diversity_correlation},
        {6, "strategy ordering", 600.0, strategy_ordering},
        {7, "degradation/rescue at 500% volume", 600.0, degradation_rescue},
        {8, "ablation direction", 600.0, ablation_direction},
        {9, "quality re-evaluation of filtered data", 600.0, quality_reevaluation},
        {10, "filter precision", 600.0, filter_precision},
        {11, "condition blindness", 600.0, condition_blindness},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    bool all_pass = true;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds < criterion.budget_seconds;
        const bool pass = outcome.pass && in_budget;
        all_pass = all_pass && pass;
        std::printf("[%s] criterion %d: %s (%s; %.1f s%s)\n", pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, outcome.detail.c_str(), seconds,
                    in_budget ? "" : " OVER BUDGET");
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
