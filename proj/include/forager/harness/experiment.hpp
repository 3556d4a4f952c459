#pragma once

#include <functional>

#include "forager/detector/detector.hpp"
#include "forager/features/features.hpp"
#include "forager/harness/config.hpp"
#include "forager/harness/metrics.hpp"

namespace forager::harness {

enum class Variant {
    Random,
    Planner,
    Meta,
    Dqn,
    DuelingDdqn,
    A3c,
    A3cPresence,
    A3cArea,
    DrlEk,
};

Variant variant_from_name(const std::string& name); // throws on unknown
const char* variant_name(Variant v);

// Millisecond clock; injectable so tests can pin the wall_ms column.
using Clock = std::function<std::int64_t()>;
Clock steady_clock_ms();
inline Clock zero_clock() {
    return [] { return std::int64_t{0}; };
}

// Everything a run needs, resolved from the flat config with shipped
// defaults. The raw config is kept for module-level keys.
struct ExperimentConfig {
    Variant variant = Variant::Random;
    long episodes = 200;
    std::vector<std::uint64_t> seeds{1};
    int k = 3;
    std::string out_dir = "runs";
    int window = 50;
    long tail = 200;
    Config raw;

    static ExperimentConfig from_config(const Config& cfg);
};

env::WorldConfig world_config_from(const Config& cfg);
detector::DetectorConfig detector_config_from(const Config& cfg);

// Score table for feature generation: defaults from the kind catalog,
// overridable with score.<kind>=<value> and tracked=<id,...> entries.
features::ObjectScoreTable score_table_from(const Config& cfg,
                                            const std::vector<env::FoodKind>& kinds,
                                            int n_classes);

features::FeatureFilter feature_filter_from(const Config& cfg, const env::WorldConfig& world);

struct RunOptions {
    bool train = true;           // false: no learner updates, greedy/low-tau acting
    std::string params_dir;      // load parameters from here when non-empty
    std::string save_params_dir; // save parameters here after the run
    Clock clock = steady_clock_ms();
};

// Runs `episodes` episodes of the configured variant with one base seed.
// Wiring per step for drl_ek: observe -> detect -> features -> (knowledge
// decider in parallel with the policy head) -> selector -> env.step ->
// learner updates. Other variants wire their subset.
MetricsLog run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                          const RunOptions& options = {});

struct SweepRow {
    int areas = 9;
    int layers = 3;
    int size = 100;
    double mean_reward = 0.0;
    double stddev = 0.0;
};

// Reduced hyperparameter grid for the meta learner; each cell trains for
// cfg.episodes and is scored over sweep.eval_episodes greedy episodes.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                                const RunOptions& options = {});

std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace forager::harness
