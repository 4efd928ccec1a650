// synq: desk-scale lab for margin-based synthetic-data quality metrics and
// quality-guided training.
//
// Verbs: gen-data, quality, run, sweep, verify, report.
// Exit codes: 0 success, 1 config error, 2 verification failure,
//             3 partial strategy failures.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synq/experiment.hpp"
#include "synq/version.hpp"

namespace {

using synq::experiment::ConfigError;
using synq::experiment::ExperimentConfig;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw ConfigError("invalid seed \"" + item + "\" in --seeds");
        }
    }
    if (seeds.empty()) throw ConfigError("--seeds must name at least one seed");
    return seeds;
}

ExperimentConfig resolve_config(const std::string& config_path, const std::string& out_dir,
                                const std::string& seeds) {
    ExperimentConfig cfg = synq::experiment::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"margin-based synthetic-data quality lab"};
    app.set_version_flag("--version", synq::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds;
    std::size_t jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config JSON");
        if (config_required) opt->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--seeds", seeds, "comma-separated seed list (overrides config)");
    };

    CLI::App* gen = app.add_subcommand("gen-data", "write testbed datasets as JSON-lines");
    add_common(gen, true);

    CLI::App* quality = app.add_subcommand("quality", "score datasets with TR/TS margin metrics");
    add_common(quality, true);

    CLI::App* run = app.add_subcommand("run", "run strategies and append the leaderboard");
    add_common(run, true);
    run->add_option("--jobs", jobs, "parallel workers");

    CLI::App* sweep = app.add_subcommand("sweep", "run the configured sweep axis");
    add_common(sweep, true);
    sweep->add_option("--jobs", jobs, "parallel workers");

    CLI::App* verify = app.add_subcommand("verify", "check the discrete-space loss bounds");
    synq::experiment::VerifyOptions verify_opt;
    std::string instance_file;
    verify->add_option("--instances", verify_opt.instances, "random instances per bound");
    verify->add_option("--seed", verify_opt.seed, "instance generator seed");
    verify->add_option("--instance-file", instance_file, "JSONL of claimed-bound instances");
    verify->add_option("--out", out_dir, "output directory");

    CLI::App* report = app.add_subcommand("report", "aggregate outputs into report.json");
    report->add_option("--out", out_dir, "output directory to aggregate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed())
            return synq::experiment::cmd_gen_data(resolve_config(config_path, out_dir, seeds));
        if (quality->parsed())
            return synq::experiment::cmd_quality(resolve_config(config_path, out_dir, seeds));
        if (run->parsed())
            return synq::experiment::cmd_run(resolve_config(config_path, out_dir, seeds), jobs);
        if (sweep->parsed())
            return synq::experiment::cmd_sweep(resolve_config(config_path, out_dir, seeds), jobs);
        if (verify->parsed()) {
            if (!out_dir.empty()) verify_opt.output_dir = out_dir;
            if (!instance_file.empty()) verify_opt.instance_file = instance_file;
            return synq::experiment::cmd_verify(verify_opt);
        }
        if (report->parsed())
            return synq::experiment::cmd_report(out_dir.empty() ? "out" : out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
