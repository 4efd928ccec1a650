#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "synq/baselines.hpp"
#include "synq/bayes.hpp"
#include "synq/dataset_io.hpp"
#include "synq/experiment.hpp"
#include "synq/quality.hpp"
#include "synq/rng.hpp"
#include "synq/syncheck.hpp"
#include "synq/version.hpp"

namespace synq::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 2;
constexpr int kExitPartialFailure = 3;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_manifest(const ExperimentConfig& cfg, const std::string& verb,
                    const std::vector<std::string>& outputs, double wall_clock) {
    json m;
    m["verb"] = verb;
    m["artifact_version"] = kVersion;
    m["config_hash"] = config_hash(cfg);
    m["config"] = json::parse(to_json(cfg));
    m["seeds"] = cfg.seeds;
    m["outputs"] = outputs;
    m["wall_clock_seconds"] = wall_clock;
    for (const auto& rel : outputs)
        if (!fs::exists(cfg.output_dir / rel))
            throw std::runtime_error("manifest lists missing output: " + rel);
    write_text(cfg.output_dir / ("manifest_" + verb + ".json"), m.dump(2) + "\n");
}

std::string hist_csv(const quality::MarginDistribution& train,
                     const quality::MarginDistribution& test) {
    std::ostringstream out;
    out.precision(17);
    out << "bin_left,bin_right,count_train,count_test_calibrated\n";
    for (std::size_t b = 0; b < train.counts.size(); ++b)
        out << train.bin_edges[b] << ',' << train.bin_edges[b + 1] << ',' << train.counts[b]
            << ',' << test.counts[b] << '\n';
    return out.str();
}

json quality_json(const quality::QualityPart& tr, const quality::QualityPart& ts) {
    json j;
    j["js_tr"] = tr.js;
    j["js_ts"] = ts.js;
    j["js_tr_uncalibrated"] = tr.js_uncalibrated;
    j["js_ts_uncalibrated"] = ts.js_uncalibrated;
    j["offset_tr"] = tr.offset;
    j["offset_ts"] = ts.offset;
    json per_class = json::object();
    for (const auto& [cls, js] : ts.per_class_js) per_class[std::to_string(cls)] = js;
    j["per_class_js"] = per_class;
    json per_class_tr = json::object();
    for (const auto& [cls, js] : tr.per_class_js) per_class_tr[std::to_string(cls)] = js;
    j["per_class_js_tr"] = per_class_tr;
    j["n_train"] = tr.n_train;
    j["n_test"] = tr.n_test;
    j["n_ts_train"] = ts.n_train;
    j["n_ts_test"] = ts.n_test;
    return j;
}

struct StrategyRow {
    std::string strategy;
    std::uint64_t seed = 0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    double kept_fraction = 1.0;
    std::string status = "ok";
};

std::string leaderboard_csv(const std::vector<StrategyRow>& rows, const std::string& hash) {
    std::ostringstream out;
    out.precision(17);
    out << "strategy,seed,accuracy,kept_fraction,config_hash,status\n";
    for (const auto& r : rows) {
        out << r.strategy << ',' << r.seed << ',';
        if (std::isnan(r.accuracy))
            out << "";
        else
            out << r.accuracy;
        out << ',' << r.kept_fraction << ',' << hash << ',' << r.status << '\n';
    }
    return out.str();
}

// Runs one strategy on prepared data. SynCheck output is reused for
// filter_cond_label when both are requested.
struct SeedRunContext {
    const ExperimentConfig& cfg;
    const testbed::Dataset& real_train;
    const testbed::Dataset& real_test;
    const testbed::Dataset& synthetic;
    std::uint64_t seed;
    std::optional<syncheck::TrainResult> syncheck_result;
    syncheck::History* history_out = nullptr;
};

StrategyRow run_strategy(SeedRunContext& ctx, const std::string& name) {
    const nn::ModelConfig mc = ctx.cfg.model_config(ctx.seed);
    TrainConfig tc = ctx.cfg.train;
    tc.seed = ctx.seed;
    StrategyRow row;
    row.strategy = name;
    row.seed = ctx.seed;
    try {
        if (name == "real_only") {
            const auto r = baselines::train_real_only(ctx.real_train, ctx.real_test, mc, tc);
            row.accuracy = r.test_accuracy;
        } else if (name == "mixture") {
            const auto r =
                baselines::train_mixture(ctx.real_train, ctx.synthetic, ctx.real_test, mc, tc);
            row.accuracy = r.test_accuracy;
        } else if (name == "filter_similarity") {
            const auto filtered = baselines::filter_similarity(ctx.real_train, ctx.synthetic,
                                                               ctx.cfg.similarity_threshold);
            row.kept_fraction = ctx.synthetic.size() == 0
                                    ? 0.0
                                    : static_cast<double>(filtered.size()) /
                                          static_cast<double>(ctx.synthetic.size());
            const auto r = baselines::train_mixture(ctx.real_train, filtered, ctx.real_test, mc, tc);
            row.accuracy = r.test_accuracy;
        } else if (name == "filter_trts") {
            const auto filtered = baselines::filter_trts(ctx.real_train, ctx.synthetic, mc, tc);
            row.kept_fraction = ctx.synthetic.size() == 0
                                    ? 0.0
                                    : static_cast<double>(filtered.size()) /
                                          static_cast<double>(ctx.synthetic.size());
            const auto r = baselines::train_mixture(ctx.real_train, filtered, ctx.real_test, mc, tc);
            row.accuracy = r.test_accuracy;
        } else if (name == "syncheck") {
            if (!ctx.syncheck_result)
                ctx.syncheck_result = syncheck::train_syncheck(ctx.real_train, ctx.synthetic, mc,
                                                               tc, &ctx.real_test);
            const auto& res = *ctx.syncheck_result;
            row.accuracy = baselines::evaluate_accuracy(res.state, ctx.real_test);
            row.kept_fraction = ctx.synthetic.size() == 0
                                    ? 0.0
                                    : static_cast<double>(res.final_inliers.size()) /
                                          static_cast<double>(ctx.synthetic.size());
            if (ctx.history_out != nullptr) *ctx.history_out = res.history;
        } else if (name == "filter_cond_label") {
            if (!ctx.syncheck_result)
                ctx.syncheck_result = syncheck::train_syncheck(ctx.real_train, ctx.synthetic, mc,
                                                               tc, &ctx.real_test);
            const auto r = baselines::filter_then_condition_label(
                ctx.real_train, ctx.synthetic, ctx.syncheck_result->final_inliers, ctx.real_test,
                mc, tc);
            row.accuracy = r.test_accuracy;
            row.kept_fraction = r.kept_fraction;
        } else {
            throw std::invalid_argument("unknown strategy: " + name);
        }
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

}  // namespace

int cmd_gen_data(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(cfg.output_dir);
    const GeneratedData data = generate(cfg.testbed, cfg.seeds.front());
    testbed::write_jsonl(data.real_train, cfg.output_dir / "real_train.jsonl");
    testbed::write_jsonl(data.real_test, cfg.output_dir / "real_test.jsonl");
    testbed::write_jsonl(data.synthetic, cfg.output_dir / "synthetic.jsonl");
    write_manifest(cfg, "gen-data",
                   {"real_train.jsonl", "real_test.jsonl", "synthetic.jsonl"},
                   elapsed_seconds(start));
    return kExitOk;
}

int cmd_quality(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    for (const char* name : {"real_train.jsonl", "real_test.jsonl", "synthetic.jsonl"})
        if (!fs::exists(cfg.output_dir / name))
            throw std::runtime_error("missing dataset file (run gen-data first): " +
                                     (cfg.output_dir / name).string());
    const auto real_train = testbed::read_jsonl(cfg.output_dir / "real_train.jsonl");
    const auto real_test = testbed::read_jsonl(cfg.output_dir / "real_test.jsonl");
    const auto synthetic = testbed::read_jsonl(cfg.output_dir / "synthetic.jsonl");
    if (synthetic.size() == 0)
        throw std::runtime_error("quality needs a non-empty synthetic dataset");

    const std::uint64_t seed = cfg.seeds.front();
    const nn::ModelConfig mc = cfg.model_config(seed);
    TrainConfig tc = cfg.train;
    tc.seed = seed;

    const auto tr = quality::tr_quality(real_train, synthetic, mc, tc, cfg.histogram_bins);
    const auto ts = quality::ts_quality(synthetic, real_test, mc, tc, cfg.histogram_bins);

    write_text(cfg.output_dir / "quality.json", quality_json(tr, ts).dump(2) + "\n");
    write_text(cfg.output_dir / "quality_tr_hist.csv", hist_csv(tr.train_hist, tr.test_hist));
    write_text(cfg.output_dir / "quality_ts_hist.csv", hist_csv(ts.train_hist, ts.test_hist));
    write_manifest(cfg, "quality",
                   {"quality.json", "quality_tr_hist.csv", "quality_ts_hist.csv"},
                   elapsed_seconds(start));
    return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg, std::size_t jobs) {
    const auto start = std::chrono::steady_clock::now();
    for (const char* name : {"real_train.jsonl", "real_test.jsonl", "synthetic.jsonl"})
        if (!fs::exists(cfg.output_dir / name))
            throw std::runtime_error("missing dataset file (run gen-data first): " +
                                     (cfg.output_dir / name).string());
    const auto real_train = testbed::read_jsonl(cfg.output_dir / "real_train.jsonl");
    const auto real_test = testbed::read_jsonl(cfg.output_dir / "real_test.jsonl");
    const auto synthetic = testbed::read_jsonl(cfg.output_dir / "synthetic.jsonl");

    struct SeedOutput {
        std::vector<StrategyRow> rows;
        syncheck::History history;
    };
    std::vector<SeedOutput> outputs(cfg.seeds.size());

    const auto run_seed = [&](std::size_t si) {
        SeedRunContext ctx{cfg, real_train, real_test, synthetic, cfg.seeds[si], std::nullopt,
                           &outputs[si].history};
        for (const auto& name : cfg.strategies)
            outputs[si].rows.push_back(run_strategy(ctx, name));
    };

    if (jobs <= 1 || cfg.seeds.size() <= 1) {
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) run_seed(si);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::min(jobs, cfg.seeds.size());
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t si = next.fetch_add(1); si < cfg.seeds.size();
                     si = next.fetch_add(1))
                    run_seed(si);
            });
        for (auto& t : pool) t.join();
    }

    std::vector<StrategyRow> rows;
    std::vector<std::string> files;
    bool any_failed = false;
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        for (const auto& r : outputs[si].rows) {
            rows.push_back(r);
            if (r.status != "ok") any_failed = true;
        }
        if (!outputs[si].history.epochs.empty()) {
            const std::string name =
                "history_syncheck_seed" + std::to_string(cfg.seeds[si]) + ".csv";
            syncheck::write_history_csv(outputs[si].history, cfg.output_dir / name);
            files.push_back(name);
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const StrategyRow& a, const StrategyRow& b) {
        return a.strategy != b.strategy ? a.strategy < b.strategy : a.seed < b.seed;
    });
    write_text(cfg.output_dir / "leaderboard.csv", leaderboard_csv(rows, config_hash(cfg)));
    files.insert(files.begin(), "leaderboard.csv");
    write_manifest(cfg, "run", files, elapsed_seconds(start));
    return any_failed ? kExitPartialFailure : kExitOk;
}

namespace {

struct SweepPointResult {
    std::string label;
    double value = 0.0;
    // per strategy: accuracies across seeds
    std::map<std::string, std::vector<double>> accuracies;
    std::vector<double> js_tr, js_ts;
    std::vector<std::string> errors;
};

ExperimentConfig point_config(const ExperimentConfig& base, const std::string& axis,
                              double value, const std::string& ablation) {
    ExperimentConfig cfg = base;
    cfg.sweep = {};
    if (axis == "noise") {
        cfg.testbed.affinity_noise_std = value;
    } else if (axis == "volume") {
        cfg.testbed.volume_percent = value;
    } else if (axis == "coverage") {
        const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(value)));
        cfg.testbed.class_coverage.resize(std::min(k, cfg.testbed.real.num_classes));
        std::iota(cfg.testbed.class_coverage.begin(), cfg.testbed.class_coverage.end(), 0);
    } else if (axis == "ablation") {
        if (ablation == "drop_ova")
            cfg.train.ablate_ova = true;
        else if (ablation == "drop_cons_ent")
            cfg.train.ablate_cons_ent = true;
        else if (ablation == "unconditional")
            cfg.testbed.conditional = false;
        // "full" leaves the config untouched
    }
    return cfg;
}

SweepPointResult run_sweep_point(const ExperimentConfig& cfg, const std::string& label,
                                 double value) {
    SweepPointResult res;
    res.label = label;
    res.value = value;
    const bool with_quality = cfg.testbed.synthetic_count() > 0;
    for (const std::uint64_t seed : cfg.seeds) {
        const GeneratedData data = generate(cfg.testbed, seed);
        SeedRunContext ctx{cfg, data.real_train, data.real_test, data.synthetic, seed,
                           std::nullopt, nullptr};
        for (const auto& name : cfg.strategies) {
            const StrategyRow row = run_strategy(ctx, name);
            if (row.status == "ok")
                res.accuracies[name].push_back(row.accuracy);
            else
                res.errors.push_back(label + "/" + name + "/seed" + std::to_string(seed) + ": " +
                                     row.status);
        }
        if (with_quality) {
            try {
                const nn::ModelConfig mc = cfg.model_config(seed);
                TrainConfig tc = cfg.train;
                tc.seed = seed;
                const auto tr =
                    quality::tr_quality(data.real_train, data.synthetic, mc, tc, cfg.histogram_bins);
                const auto ts =
                    quality::ts_quality(data.synthetic, data.real_test, mc, tc, cfg.histogram_bins);
                res.js_tr.push_back(tr.js);
                res.js_ts.push_back(ts.js);
                res.accuracies["tstr_probe"].push_back(
                    baselines::evaluate_accuracy(ts.model, data.real_test));
            } catch (const std::exception& e) {
                res.errors.push_back(label + "/quality/seed" + std::to_string(seed) + ": " +
                                     e.what());
            }
        }
    }
    return res;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg, std::size_t jobs) {
    const auto start = std::chrono::steady_clock::now();
    if (cfg.sweep.axis.empty()) throw ConfigError("sweep requires a sweep axis in the config");
    fs::create_directories(cfg.output_dir);

    struct Point {
        ExperimentConfig cfg;
        std::string label;
        double value;
    };
    std::vector<Point> points;
    if (cfg.sweep.axis == "ablation") {
        for (const auto& a : cfg.sweep.ablations)
            points.push_back({point_config(cfg, "ablation", 0.0, a), a, 0.0});
    } else {
        for (double v : cfg.sweep.values) {
            std::ostringstream label;
            label << cfg.sweep.axis << "=" << v;
            points.push_back({point_config(cfg, cfg.sweep.axis, v, ""), label.str(), v});
        }
    }

    std::vector<SweepPointResult> results(points.size());
    if (jobs <= 1 || points.size() <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i)
            results[i] = run_sweep_point(points[i].cfg, points[i].label, points[i].value);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::min(jobs, points.size());
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                    results[i] = run_sweep_point(points[i].cfg, points[i].label, points[i].value);
            });
        for (auto& t : pool) t.join();
    }

    std::ostringstream csv;
    csv.precision(17);
    csv << "axis,value,strategy,mean_accuracy,std_accuracy,mean_js_tr,mean_js_ts,n_seeds\n";
    bool any_failed = false;
    for (const auto& res : results) {
        if (!res.errors.empty()) any_failed = true;
        const double js_tr = mean_of(res.js_tr);
        const double js_ts = mean_of(res.js_ts);
        for (const auto& [name, accs] : res.accuracies) {
            csv << cfg.sweep.axis << ',' << res.label << ',' << name << ',' << mean_of(accs)
                << ',' << stddev_of(accs) << ',' << js_tr << ',' << js_ts << ',' << accs.size()
                << '\n';
        }
        for (std::string err : res.errors) {
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            csv << cfg.sweep.axis << ',' << res.label << ",failed:" << err << ",,,,,0\n";
        }
    }
    write_text(cfg.output_dir / "sweep.csv", csv.str());

    // quality-knob axes additionally report metric/accuracy correlation
    std::vector<std::string> outputs = {"sweep.csv"};
    if (cfg.sweep.axis == "noise" || cfg.sweep.axis == "volume" || cfg.sweep.axis == "coverage") {
        const bool affinity_axis = cfg.sweep.axis == "noise";
        const std::string metric = affinity_axis ? "js_tr" : "js_ts";
        const std::string target = affinity_axis ? "mixture" : "tstr_probe";
        std::vector<double> xs, ys;
        for (const auto& res : results) {
            const double x = affinity_axis ? mean_of(res.js_tr) : mean_of(res.js_ts);
            const double y = mean_of(res.accuracies.count(target) ? res.accuracies.at(target)
                                                                  : std::vector<double>{});
            if (std::isnan(x) || std::isnan(y)) continue;
            xs.push_back(x);
            ys.push_back(y);
        }
        std::ostringstream corr;
        corr.precision(17);
        corr << "axis,metric,target,r,t_stat,n_points\n";
        if (xs.size() >= 3) {
            try {
                const auto c = quality::pearson(xs, ys);
                corr << cfg.sweep.axis << ',' << metric << ',' << target << ',' << c.r << ','
                     << c.t_stat << ',' << xs.size() << '\n';
            } catch (const std::exception& e) {
                corr << cfg.sweep.axis << ',' << metric << ',' << target << ",,,"
                     << xs.size() << '\n';
            }
        }
        write_text(cfg.output_dir / "sweep_correlation.csv", corr.str());
        outputs.push_back("sweep_correlation.csv");
    }

    write_manifest(cfg, "sweep", outputs, elapsed_seconds(start));
    return any_failed ? kExitPartialFailure : kExitOk;
}

int cmd_verify(const VerifyOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(options.output_dir);
    const auto summary = bayes::run_verification(options.instances, options.seed);

    json j;
    j["artifact_version"] = kVersion;
    j["instances_requested"] = options.instances;
    j["tv_bound"] = json{{"instances", summary.tv_bound_instances},
                         {"violations", summary.tv_bound_violations},
                         {"worst_slack", summary.tv_bound_worst_slack}};
    j["conditional_tv"] = json{{"instances", summary.cond_tv_instances},
                               {"violations", summary.cond_tv_violations},
                               {"vacuous", summary.cond_tv_vacuous},
                               {"worst_slack", summary.cond_tv_worst_slack}};
    j["lemma_optimality"] = json{{"instances", summary.lemma_instances},
                                 {"violations", summary.lemma_violations}};
    j["tstr_optimality"] = json{{"instances", summary.tstr_opt_instances},
                                {"violations", summary.tstr_opt_violations}};

    bool all_hold = summary.all_hold();

    // Optional instance file: each line claims lhs <= rhs for a stated
    // (p, p_theta, h) triple; recompute lhs and check the claim.
    if (!options.instance_file.empty()) {
        std::ifstream in(options.instance_file, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open instance file: " +
                                     options.instance_file.string());
        std::size_t checked = 0, violations = 0;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json inst;
            try {
                inst = json::parse(line);
            } catch (const json::parse_error& e) {
                throw std::runtime_error("instance file line " + std::to_string(lineno) + ": " +
                                         e.what());
            }
            const auto table = [&](const char* key) {
                const auto rows = inst.at(key).get<std::vector<std::vector<double>>>();
                bayes::DiscreteJoint joint;
                joint.nx = rows.size();
                joint.ny = rows.empty() ? 0 : rows.front().size();
                for (const auto& r : rows)
                    joint.probs.insert(joint.probs.end(), r.begin(), r.end());
                joint.validate();
                return joint;
            };
            const auto p = table("p");
            const auto q = table("p_theta");
            bayes::BoundedLossFunction h;
            h.h = inst.at("h").get<std::vector<double>>();
            h.validate();
            const double claimed_rhs = inst.at("claimed_rhs").get<double>();
            const auto check = bayes::tv_bound_check(p, q, h);
            ++checked;
            if (check.lhs > claimed_rhs + 1e-12) ++violations;
        }
        j["instance_file"] = json{{"path", options.instance_file.string()},
                                  {"instances", checked},
                                  {"violations", violations}};
        if (violations > 0) all_hold = false;
    }

    j["all_hold"] = all_hold;
    j["wall_clock_seconds"] = elapsed_seconds(start);
    const std::string text = j.dump(2) + "\n";
    write_text(options.output_dir / "verify.json", text);
    std::cout << text;
    return all_hold ? kExitOk : kExitVerifyFailure;
}

int cmd_report(const std::filesystem::path& output_dir) {
    json report;
    report["artifact_version"] = kVersion;

    const fs::path lb = output_dir / "leaderboard.csv";
    if (fs::exists(lb)) {
        std::ifstream in(lb);
        std::string line;
        std::getline(in, line);  // header
        std::map<std::string, std::vector<double>> acc;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string strategy, seed, accuracy, kept, hash, status;
            std::getline(row, strategy, ',');
            std::getline(row, seed, ',');
            std::getline(row, accuracy, ',');
            std::getline(row, kept, ',');
            std::getline(row, hash, ',');
            std::getline(row, status, ',');
            if (status == "ok" && !accuracy.empty()) acc[strategy].push_back(std::stod(accuracy));
        }
        json strategies = json::object();
        for (const auto& [name, v] : acc) {
            strategies[name] = json{{"mean_accuracy", mean_of(v)},
                                    {"std_accuracy", stddev_of(v)},
                                    {"runs", v.size()}};
        }
        report["strategies"] = strategies;
    }
    const fs::path q = output_dir / "quality.json";
    if (fs::exists(q)) {
        std::ifstream in(q);
        report["quality"] = json::parse(in);
    }
    if (!report.contains("strategies") && !report.contains("quality"))
        throw std::runtime_error("report: no leaderboard.csv or quality.json under " +
                                 output_dir.string());
    const std::string text = report.dump(2) + "\n";
    write_text(output_dir / "report.json", text);
    std::cout << text;
    return kExitOk;
}

}  // namespace synq::experiment
