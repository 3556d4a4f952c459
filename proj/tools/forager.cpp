// Command-line front end: train/eval experiment variants, sweep the meta
// learner grid, plot metric logs, validate rule files, calibrate the
// detector noise model.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "forager/detector/detector.hpp"
#include "forager/harness/experiment.hpp"
#include "forager/harness/plots.hpp"
#include "forager/knowledge/rules.hpp"

namespace {

using namespace forager;

harness::Config load_config(const std::string& path) {
    if (path.empty()) return harness::Config{};
    return harness::Config::from_file(path);
}

int cmd_train_or_eval(const std::string& config_path, const std::string& variant,
                      long seed_override, long episodes_override, const std::string& out_override,
                      bool train) {
    harness::Config raw = load_config(config_path);
    if (!variant.empty()) raw.set("variant", variant);
    if (seed_override >= 0) raw.set("seeds", std::to_string(seed_override));
    if (episodes_override > 0) raw.set("episodes", std::to_string(episodes_override));
    if (!out_override.empty()) raw.set("out", out_override);

    const harness::ExperimentConfig cfg = harness::ExperimentConfig::from_config(raw);
    std::filesystem::create_directories(cfg.out_dir);

    for (std::uint64_t seed : cfg.seeds) {
        harness::RunOptions opt;
        opt.train = train;
        if (train) {
            opt.save_params_dir = cfg.out_dir;
        } else {
            opt.params_dir = raw.get_str("params", cfg.out_dir);
        }
        const harness::MetricsLog log = harness::run_experiment(cfg, seed, opt);
        const std::string csv_path = cfg.out_dir + "/metrics_" +
                                     harness::variant_name(cfg.variant) + "_seed" +
                                     std::to_string(seed) + (train ? "" : "_eval") + ".csv";
        log.write_csv(csv_path);

        const auto rows = harness::compare_table({{harness::variant_name(cfg.variant), log}},
                                                 cfg.tail);
        std::cout << (train ? "train" : "eval") << " " << harness::variant_name(cfg.variant)
                  << " seed=" << seed << " episodes=" << log.size()
                  << " tail_mean=" << harness::format_double(rows[0].mean)
                  << " tail_std=" << harness::format_double(rows[0].stddev) << "\n"
                  << "  wrote " << csv_path << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& config_path) {
    harness::Config raw = load_config(config_path);
    const harness::ExperimentConfig cfg = harness::ExperimentConfig::from_config(raw);
    std::filesystem::create_directories(cfg.out_dir);
    const auto rows = harness::run_sweep(cfg, cfg.seeds.front());
    const std::string csv = harness::sweep_csv(rows);
    const std::string path = cfg.out_dir + "/sweep.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("sweep: cannot write " + path);
    out << csv;
    std::cout << csv << "wrote " << path << "\n";
    return 0;
}

int cmd_plot(const std::string& log_path, const std::string& out_dir, int window) {
    const harness::MetricsLog log = harness::MetricsLog::read_csv(log_path);
    const std::string dir =
        out_dir.empty() ? std::filesystem::path(log_path).parent_path().string() : out_dir;
    const auto written = harness::emit_plots(log, dir.empty() ? "." : dir, window);
    for (const std::string& p : written) std::cout << "wrote " << p << "\n";
    return 0;
}

int cmd_rules_check(const std::string& path) {
    const auto rules = knowledge::load_rules_file(path);
    std::cout << path << ": " << rules.size() << " rules ok\n";
    return 0;
}

int cmd_detector_calibrate(const std::string& config_path, long frames) {
    harness::Config raw = load_config(config_path);
    const env::WorldConfig wc = harness::world_config_from(raw);
    const detector::DetectorConfig dc = harness::detector_config_from(raw);
    const auto sampler = detector::random_agent_sampler(wc, raw.get_int("det.sample_seed", 99));
    const detector::CalibrationReport rep = detector::calibrate(dc, frames, sampler);
    std::cout << "fp_share,fn_share\n"
              << harness::format_double(rep.mix.fp_share) << ','
              << harness::format_double(rep.mix.fn_share) << "\n";
    std::cout << "kind,precision\n";
    for (std::size_t k = 0; k < rep.per_kind_precision.size(); ++k)
        std::cout << k << ',' << harness::format_double(rep.per_kind_precision[k]) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"food-gathering reinforcement learning laboratory"};
    app.require_subcommand(1);

    std::string config_path, variant, out_dir, log_path, rules_path;
    long seed = -1, episodes = 0, frames = 10000;
    int window = 50;

    auto* train = app.add_subcommand("train", "train a variant and write metrics CSV");
    train->add_option("--config", config_path, "flat key=value config file");
    train->add_option("--variant", variant, "variant name (overrides config)");
    train->add_option("--seed", seed, "single seed (overrides config seeds)");
    train->add_option("--episodes", episodes, "episode budget (overrides config)");
    train->add_option("--out", out_dir, "output directory (overrides config)");

    auto* eval = app.add_subcommand("eval", "run a variant without learning");
    eval->add_option("--config", config_path, "flat key=value config file");
    eval->add_option("--variant", variant, "variant name (overrides config)");
    eval->add_option("--seed", seed, "single seed (overrides config seeds)");
    eval->add_option("--episodes", episodes, "episode budget (overrides config)");
    eval->add_option("--out", out_dir, "output directory (overrides config)");

    auto* sweep = app.add_subcommand("sweep", "meta-learner hyperparameter grid");
    sweep->add_option("--config", config_path, "flat key=value config file");

    auto* plot = app.add_subcommand("plot", "render curves from a metrics CSV");
    plot->add_option("log", log_path, "metrics CSV path")->required();
    plot->add_option("--out", out_dir, "output directory (default: next to the log)");
    plot->add_option("--window", window, "moving-average window");

    auto* rules = app.add_subcommand("rules", "rule file tooling");
    auto* rules_check = rules->add_subcommand("check", "validate a rule file");
    rules_check->add_option("file", rules_path, "rule file path")->required();

    auto* det = app.add_subcommand("detector", "detector stand-in tooling");
    auto* det_cal = det->add_subcommand("calibrate", "measure the error mix as CSV");
    det_cal->add_option("--config", config_path, "flat key=value config file");
    det_cal->add_option("--frames", frames, "number of frames to sample");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return cmd_train_or_eval(config_path, variant, seed, episodes, out_dir, true);
        if (eval->parsed())
            return cmd_train_or_eval(config_path, variant, seed, episodes, out_dir, false);
        if (sweep->parsed()) return cmd_sweep(config_path);
        if (plot->parsed()) return cmd_plot(log_path, out_dir, window);
        if (rules->parsed()) {
            if (!rules_check->parsed()) {
                std::cerr << "error: expected 'rules check <file>'\n";
                return 2;
            }
            return cmd_rules_check(rules_path);
        }
        if (det->parsed()) {
            if (!det_cal->parsed()) {
                std::cerr << "error: expected 'detector calibrate'\n";
                return 2;
            }
            return cmd_detector_calibrate(config_path, frames);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
