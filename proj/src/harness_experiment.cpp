#include "forager/harness/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "forager/a3c/a3c.hpp"
#include "forager/knowledge/meta.hpp"
#include "forager/knowledge/planner.hpp"
#include "forager/neural/io.hpp"
#include "forager/selector/selector.hpp"

namespace forager::harness {

namespace {

const std::map<std::string, Variant> kVariants = {
    {"random", Variant::Random},     {"planner", Variant::Planner},
    {"meta", Variant::Meta},         {"dqn", Variant::Dqn},
    {"dueling_ddqn", Variant::DuelingDdqn}, {"a3c", Variant::A3c},
    {"a3c_presence", Variant::A3cPresence}, {"a3c_area", Variant::A3cArea},
    {"drl_ek", Variant::DrlEk},
};

std::vector<int> int_list(const Config& cfg, const std::string& key,
                          const std::vector<int>& fallback) {
    std::vector<long> fb(fallback.begin(), fallback.end());
    const std::vector<long> got = cfg.get_int_list(key, fb);
    return std::vector<int>(got.begin(), got.end());
}

} // namespace

Variant variant_from_name(const std::string& name) {
    auto it = kVariants.find(name);
    if (it == kVariants.end()) throw std::runtime_error("unknown variant: " + name);
    return it->second;
}

const char* variant_name(Variant v) {
    for (const auto& [name, var] : kVariants)
        if (var == v) return name.c_str();
    return "?";
}

Clock steady_clock_ms() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig ec;
    ec.variant = variant_from_name(cfg.get_str("variant", "random"));
    ec.episodes = cfg.get_int("episodes", 200);
    if (ec.episodes < 1) throw std::runtime_error("config: episodes must be >= 1");
    const std::vector<long> seeds = cfg.get_int_list("seeds", {1});
    if (seeds.empty()) throw std::runtime_error("config: at least one seed required");
    ec.seeds.assign(seeds.begin(), seeds.end());
    ec.k = static_cast<int>(cfg.get_int("k", 3));
    if (ec.k < 1) throw std::runtime_error("config: k must be >= 1");
    ec.out_dir = cfg.get_str("out", "runs");
    ec.window = static_cast<int>(cfg.get_int("window", 50));
    ec.tail = cfg.get_int("tail", 200);
    ec.raw = cfg;
    return ec;
}

env::WorldConfig world_config_from(const Config& cfg) {
    env::WorldConfig wc;
    wc.grid_w = static_cast<int>(cfg.get_int("env.grid_w", wc.grid_w));
    wc.grid_h = static_cast<int>(cfg.get_int("env.grid_h", wc.grid_h));
    wc.n_food_items = static_cast<int>(cfg.get_int("env.n_food_items", wc.n_food_items));
    wc.n_food_kinds = static_cast<int>(cfg.get_int("env.n_food_kinds", wc.n_food_kinds));
    wc.n_obstacles = static_cast<int>(cfg.get_int("env.n_obstacles", wc.n_obstacles));
    wc.episode_len = static_cast<int>(cfg.get_int("env.episode_len", wc.episode_len));
    wc.fov_depth = static_cast<int>(cfg.get_int("env.fov_depth", wc.fov_depth));
    wc.fov_halfwidth = static_cast<int>(cfg.get_int("env.fov_halfwidth", wc.fov_halfwidth));
    wc.max_visible_distance = cfg.get_real("env.max_visible_distance", wc.max_visible_distance);
    wc.validate();
    return wc;
}

detector::DetectorConfig detector_config_from(const Config& cfg) {
    detector::DetectorConfig dc;
    dc.p_miss = cfg.get_real("det.p_miss", dc.p_miss);
    dc.fp_rate = cfg.get_real("det.fp_rate", dc.fp_rate);
    dc.confusion_swap = cfg.get_real("det.confusion_swap", dc.confusion_swap);
    dc.box_jitter = cfg.get_real("det.box_jitter", dc.box_jitter);
    dc.confidence_law.true_mean = cfg.get_real("det.conf_true_mean", dc.confidence_law.true_mean);
    dc.confidence_law.true_sd = cfg.get_real("det.conf_true_sd", dc.confidence_law.true_sd);
    dc.confidence_law.fp_mean = cfg.get_real("det.conf_fp_mean", dc.confidence_law.fp_mean);
    dc.confidence_law.fp_sd = cfg.get_real("det.conf_fp_sd", dc.confidence_law.fp_sd);
    dc.n_food_kinds = static_cast<int>(cfg.get_int("env.n_food_kinds", dc.n_food_kinds));
    const std::vector<long> pair = cfg.get_int_list("det.confusion_pair", {0, 1});
    dc.confusion_pairs.clear();
    if (pair.size() == 2)
        dc.confusion_pairs.push_back({static_cast<int>(pair[0]), static_cast<int>(pair[1])});
    else if (!pair.empty())
        throw std::runtime_error("config: det.confusion_pair needs exactly two kind ids");
    dc.validate();
    return dc;
}

features::ObjectScoreTable score_table_from(const Config& cfg,
                                            const std::vector<env::FoodKind>& kinds,
                                            int n_classes) {
    features::ObjectScoreTable table = features::default_score_table(kinds, n_classes);
    const std::vector<long> tracked = cfg.get_int_list("tracked", {});
    if (cfg.has("tracked")) {
        table.tracked.clear();
        for (long t : tracked) table.tracked.insert(static_cast<int>(t));
    }
    for (const auto& [key, value] : cfg.entries()) {
        if (key.rfind("score.", 0) != 0) continue;
        const std::string kind_tok = key.substr(6);
        int kind = -1;
        try {
            kind = std::stoi(kind_tok);
        } catch (const std::exception&) {
            throw std::runtime_error("config: bad score key '" + key + "'");
        }
        if (kind < 0 || kind >= n_classes)
            throw std::runtime_error("config: score kind out of range in '" + key + "'");
        table.scores[kind] = std::stod(value);
        table.tracked.insert(kind);
    }
    return table;
}

features::FeatureFilter feature_filter_from(const Config& cfg, const env::WorldConfig& world) {
    features::FeatureFilter f;
    f.plane_range = world.max_visible_distance;
    f.max_distance = cfg.get_real("feat.max_distance", 0.75 * world.max_visible_distance);
    f.min_confidence = cfg.get_real("feat.min_confidence", 0.25);
    const std::string mask = cfg.get_str("feat.mask", "full");
    if (mask == "bottom") {
        f.mask = {0.5, 1.0};
    } else if (mask != "full") {
        throw std::runtime_error("config: feat.mask must be 'full' or 'bottom'");
    }
    return f;
}

namespace {

using a3c::Vec;

// Wiring shared by every variant that senses the world: simulator, noisy
// detector, feature generation, observation stacking.
struct Pipeline {
    env::WorldConfig world_cfg;
    env::World world;
    detector::DetectorConfig det_cfg;
    Rng det_rng;
    features::ObjectScoreTable table;      // feature-injection table
    features::ObjectScoreTable meta_table; // confusion pair removed
    features::FeatureFilter filter;
    int k;
    features::FeatureStack area_stack;
    features::FeatureStack meta_stack;
    a3c::ObsStack obs_stack;
    knowledge::KindCatalog catalog;

    struct Frame {
        env::Observation obs;
        std::vector<detector::Detection> dets;
        features::PresenceVector presence;
    };

    Pipeline(const ExperimentConfig& cfg, std::uint64_t run_seed)
        : world_cfg(world_config_from(cfg.raw)),
          world(world_cfg),
          det_cfg(detector_config_from(cfg.raw)),
          det_rng(mix_seed(run_seed, 0xDE7EC7)),
          table(score_table_from(cfg.raw, world.kinds(), world_cfg.n_food_kinds + 3)),
          meta_table(table),
          filter(feature_filter_from(cfg.raw, world_cfg)),
          k(cfg.k),
          area_stack(cfg.k),
          meta_stack(cfg.k),
          obs_stack(static_cast<std::size_t>(world_cfg.fov_depth) *
                    (2 * world_cfg.fov_halfwidth + 1) * (4 + world_cfg.n_food_kinds)) {
        for (const auto& [a, b] : det_cfg.confusion_pairs) {
            meta_table.tracked.erase(a);
            meta_table.tracked.erase(b);
        }
        catalog.foods = world.kinds();
    }

    void begin_episode(std::uint64_t episode_seed) {
        world.reset(episode_seed);
        area_stack.reset();
        meta_stack.reset();
        obs_stack.reset();
    }

    // observe -> detect -> features, in that order, once per step.
    Frame sense() {
        Frame f;
        f.obs = world.observe();
        f.dets = detector::detect(f.obs.visible_objects, det_cfg, det_rng);
        area_stack = features::push_frame(area_stack, features::area_scores(f.dets, k, table, filter));
        meta_stack =
            features::push_frame(meta_stack, features::area_scores(f.dets, k, meta_table, filter));
        f.presence = features::presence(f.dets, table);
        obs_stack.push(f.obs.occupancy);
        return f;
    }

    Vec meta_state() const { return meta_stack.flattened(); }
};

enum class FeatureMode { None, Presence, AreaStack };

Vec encode_rl_state(const Pipeline& pipe, const Pipeline::Frame& frame, FeatureMode mode) {
    switch (mode) {
        case FeatureMode::None:
            return a3c::encode_state(pipe.obs_stack, std::nullopt);
        case FeatureMode::Presence:
            return a3c::encode_state(pipe.obs_stack, frame.presence.as_input());
        case FeatureMode::AreaStack:
            return a3c::encode_state(pipe.obs_stack, pipe.area_stack.flattened());
    }
    return {};
}

int rl_state_size(const Pipeline& pipe, FeatureMode mode) {
    int n = static_cast<int>(pipe.obs_stack.flat_size());
    if (mode == FeatureMode::Presence) n += static_cast<int>(pipe.table.tracked.size());
    if (mode == FeatureMode::AreaStack) n += 3 * pipe.k * pipe.k;
    return n;
}

// Adapts the full sensing pipeline to the worker-facing surface.
class PipelineAdapter : public a3c::EnvAdapter {
public:
    PipelineAdapter(const ExperimentConfig& cfg, std::uint64_t run_seed, FeatureMode mode)
        : pipe_(cfg, run_seed), mode_(mode) {}

    Vec reset(std::uint64_t episode_seed) override {
        pipe_.begin_episode(episode_seed);
        const Pipeline::Frame f = pipe_.sense();
        return encode_rl_state(pipe_, f, mode_);
    }

    std::tuple<Vec, double, bool> step(int action) override {
        const env::StepResult r = pipe_.world.step(static_cast<env::Action>(action));
        if (r.done) return {Vec(rl_state_size(pipe_, mode_), 0.0), r.reward, true};
        const Pipeline::Frame f = pipe_.sense();
        return {encode_rl_state(pipe_, f, mode_), r.reward, false};
    }

    Pipeline& pipeline() { return pipe_; }

private:
    Pipeline pipe_;
    FeatureMode mode_;
};

knowledge::MetaConfig meta_config_from(const Config& cfg, int input_size,
                                       const std::vector<int>& default_hidden) {
    knowledge::MetaConfig mc;
    mc.input_size = input_size;
    mc.hidden = int_list(cfg, "meta.hidden", default_hidden);
    mc.optimizer = neural::adam(cfg.get_real("meta.lr", 1e-3));
    mc.settings.gamma = cfg.get_real("gamma", 1.0);
    mc.settings.batch_size = static_cast<int>(cfg.get_int("meta.batch", 32));
    mc.settings.target_sync_period = cfg.get_int("meta.sync", 500);
    mc.replay_capacity = static_cast<std::size_t>(cfg.get_int("meta.replay", 100000));
    mc.epsilon.start = cfg.get_real("meta.eps_start", 1.0);
    mc.epsilon.end = cfg.get_real("meta.eps_end", 0.05);
    mc.epsilon.steps = cfg.get_int("meta.eps_steps", 50000);
    return mc;
}

selector::SelectorConfig selector_config_from(const Config& cfg) {
    selector::SelectorConfig sc;
    sc.hidden = int_list(cfg, "sel.hidden", {50, 50});
    sc.replay_capacity = static_cast<std::size_t>(cfg.get_int("sel.replay", 1000000));
    sc.settings.gamma = cfg.get_real("gamma", 1.0);
    sc.settings.batch_size = static_cast<int>(cfg.get_int("sel.batch", 32));
    sc.settings.target_sync_period = cfg.get_int("sel.sync", 500);
    sc.tau.start = cfg.get_real("sel.tau_start", 1.0);
    sc.tau.end = cfg.get_real("sel.tau_end", 0.1);
    sc.tau.steps = cfg.get_int("sel.tau_steps", 50000);
    sc.optimizer = neural::rmsprop(cfg.get_real("sel.lr", 1e-3));
    sc.append_features = cfg.get_bool("sel.append_features", false);
    return sc;
}

a3c::WorkerConfig worker_config_from(const Config& cfg) {
    a3c::WorkerConfig wc;
    wc.n_workers = static_cast<int>(cfg.get_int("a3c.workers", 3));
    wc.t_max = static_cast<int>(cfg.get_int("a3c.t_max", 5));
    wc.gamma = cfg.get_real("gamma", 1.0);
    wc.entropy_coeff = cfg.get_real("a3c.entropy", 0.01);
    wc.value_loss_coeff = cfg.get_real("a3c.value_coeff", 0.5);
    wc.optimizer = neural::rmsprop(cfg.get_real("a3c.lr", 7e-4));
    if (wc.n_workers < 1 || wc.t_max < 1)
        throw std::runtime_error("config: a3c.workers and a3c.t_max must be >= 1");
    return wc;
}

// Plain epsilon-greedy DQN used by the value-baseline variant.
struct DqnAgent {
    rl::MlpQNet online;
    rl::MlpQNet target;
    neural::OptState opt;
    rl::ReplayMemory replay;
    rl::RLSettings settings;
    rl::LinearSchedule eps;
    Rng rng;
    long acts = 0;
    long updates = 0;

    DqnAgent(int input, const std::vector<int>& hidden, const neural::OptConfig& optimizer,
             const rl::RLSettings& st, std::size_t capacity, const rl::LinearSchedule& schedule,
             std::uint64_t seed)
        : online([&] {
              Rng r(mix_seed(seed, 0xD62));
              return rl::MlpQNet(input, hidden, env::kNumActions, r);
          }()),
          target(online),
          opt(optimizer, online.net().params()),
          replay(capacity),
          settings(st),
          eps(schedule),
          rng(mix_seed(seed, 0xD63)) {}

    int act(const Vec& s, bool explore) {
        const double e = eps.value(acts);
        if (explore) ++acts;
        if (explore && rng.uniform01() < e)
            return static_cast<int>(rng.uniform_int(env::kNumActions));
        const Vec q = online.q(s);
        return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
    }

    bool train_step() {
        if (replay.size() < static_cast<std::size_t>(settings.batch_size)) return false;
        const std::vector<rl::Transition> batch = replay.sample(settings.batch_size, rng);
        neural::Grads grads = online.zero_grads();
        rl::dqn_loss_and_grad(online, target, batch, settings, rl::TdMode::Max, grads);
        neural::optimizer_step(opt, online.net().params(), grads);
        ++updates;
        if (updates % settings.target_sync_period == 0)
            target.net().params() = online.net().params();
        return true;
    }
};

std::uint64_t episode_seed(std::uint64_t run_seed, long episode) {
    return mix_seed(run_seed, 0x100000 + static_cast<std::uint64_t>(episode));
}

EpisodeRecord make_record(long episode, std::uint64_t seed, double reward, long steps,
                          std::int64_t wall_ms) {
    EpisodeRecord r;
    r.episode = episode;
    r.seed = seed;
    r.reward = reward;
    r.steps = steps;
    r.wall_ms = wall_ms;
    return r;
}

MetricsLog run_random(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    const env::WorldConfig wc = world_config_from(cfg.raw);
    env::World world(wc);
    Rng rng(mix_seed(seed, 0x9A2D0));
    MetricsLog log;
    for (long e = 0; e < cfg.episodes; ++e) {
        const std::int64_t t0 = opt.clock();
        world.reset(episode_seed(seed, e));
        while (!world.done())
            world.step(static_cast<env::Action>(rng.uniform_int(env::kNumActions)));
        log.append(make_record(e, seed, world.cum_reward(), wc.episode_len, opt.clock() - t0));
    }
    return log;
}

MetricsLog run_planner(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    Pipeline pipe(cfg, seed);
    knowledge::PlannerContext ctx;
    const std::string rules_path = cfg.raw.get_str("rules", "");
    ctx.rules = rules_path.empty() ? knowledge::parse_rules(knowledge::default_rules_text())
                                   : knowledge::load_rules_file(rules_path);
    ctx.table = pipe.table;
    ctx.catalog = pipe.catalog;
    ctx.plane_range = pipe.world_cfg.max_visible_distance;

    MetricsLog log;
    for (long e = 0; e < cfg.episodes; ++e) {
        const std::int64_t t0 = opt.clock();
        pipe.begin_episode(episode_seed(seed, e));
        knowledge::Plan plan;
        while (!pipe.world.done()) {
            const Pipeline::Frame f = pipe.sense();
            knowledge::PlannerResult r = knowledge::planner_decide(f.dets, ctx, plan);
            plan = std::move(r.plan);
            pipe.world.step(r.action);
        }
        log.append(make_record(e, seed, pipe.world.cum_reward(), pipe.world_cfg.episode_len,
                               opt.clock() - t0));
    }
    return log;
}

void save_dueling(const rl::DuelingNet& net, const std::string& dir, const std::string& prefix) {
    neural::save_params(net.trunk().params(), dir + "/" + prefix + "_trunk.params");
    neural::save_params(net.adv_head().params(), dir + "/" + prefix + "_adv.params");
    neural::save_params(net.val_head().params(), dir + "/" + prefix + "_val.params");
}

void load_dueling(rl::DuelingNet& net, const std::string& dir, const std::string& prefix) {
    net.trunk().params() = neural::load_params(dir + "/" + prefix + "_trunk.params");
    net.adv_head().params() = neural::load_params(dir + "/" + prefix + "_adv.params");
    net.val_head().params() = neural::load_params(dir + "/" + prefix + "_val.params");
}

void save_pv(const a3c::PolicyValueNet& net, const std::string& dir) {
    neural::save_params(net.trunk().params(), dir + "/a3c_trunk.params");
    neural::save_params(net.policy_head().params(), dir + "/a3c_policy.params");
    neural::save_params(net.value_head().params(), dir + "/a3c_value.params");
}

void load_pv(a3c::PolicyValueNet& net, const std::string& dir) {
    net.trunk().params() = neural::load_params(dir + "/a3c_trunk.params");
    net.policy_head().params() = neural::load_params(dir + "/a3c_policy.params");
    net.value_head().params() = neural::load_params(dir + "/a3c_value.params");
}

// Meta learner alone, and the dueling-DDQN pixel-stand-in baseline; they
// share machinery and differ in their input encoding.
MetricsLog run_dueling_learner(const ExperimentConfig& cfg, std::uint64_t seed,
                               const RunOptions& opt, bool meta_features) {
    Pipeline pipe(cfg, seed);
    const int input = meta_features ? 3 * cfg.k * cfg.k : rl_state_size(pipe, FeatureMode::None);
    const std::vector<int> default_hidden =
        meta_features ? std::vector<int>{100, 100, 100} : int_list(cfg.raw, "net.hidden", {128, 64});
    knowledge::MetaLearner learner(meta_config_from(cfg.raw, input, default_hidden),
                                   mix_seed(seed, 0x4d45));
    const std::string prefix = meta_features ? "meta" : "dueling";
    if (!opt.params_dir.empty()) load_dueling(learner.online(), opt.params_dir, prefix);

    MetricsLog log;
    for (long e = 0; e < cfg.episodes; ++e) {
        const std::int64_t t0 = opt.clock();
        pipe.begin_episode(episode_seed(seed, e));
        Pipeline::Frame f = pipe.sense();
        Vec s = meta_features ? pipe.meta_state() : encode_rl_state(pipe, f, FeatureMode::None);
        while (!pipe.world.done()) {
            const int a = learner.decide(s, opt.train);
            const env::StepResult sr = pipe.world.step(static_cast<env::Action>(a));
            Vec s_next(s.size(), 0.0);
            if (!sr.done) {
                f = pipe.sense();
                s_next = meta_features ? pipe.meta_state()
                                       : encode_rl_state(pipe, f, FeatureMode::None);
            }
            if (opt.train) {
                learner.remember({s, a, sr.reward, s_next, sr.done});
                learner.train_step();
            }
            s = std::move(s_next);
        }
        log.append(make_record(e, seed, pipe.world.cum_reward(), pipe.world_cfg.episode_len,
                               opt.clock() - t0));
    }
    if (!opt.save_params_dir.empty()) save_dueling(learner.online(), opt.save_params_dir, prefix);
    return log;
}

MetricsLog run_dqn(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    Pipeline pipe(cfg, seed);
    const int input = rl_state_size(pipe, FeatureMode::None);
    DqnAgent agent(input, int_list(cfg.raw, "net.hidden", {128, 64}),
                   neural::rmsprop(cfg.raw.get_real("dqn.lr", 1e-3)),
                   rl::RLSettings{cfg.raw.get_real("gamma", 1.0), cfg.raw.get_int("dqn.sync", 500),
                                  static_cast<int>(cfg.raw.get_int("dqn.batch", 32))},
                   static_cast<std::size_t>(cfg.raw.get_int("dqn.replay", 100000)),
                   rl::LinearSchedule{cfg.raw.get_real("dqn.eps_start", 1.0),
                                      cfg.raw.get_real("dqn.eps_end", 0.05),
                                      cfg.raw.get_int("dqn.eps_steps", 50000)},
                   mix_seed(seed, 0xD69));
    if (!opt.params_dir.empty())
        agent.online.net().params() = neural::load_params(opt.params_dir + "/dqn.params");

    MetricsLog log;
    for (long e = 0; e < cfg.episodes; ++e) {
        const std::int64_t t0 = opt.clock();
        pipe.begin_episode(episode_seed(seed, e));
        Pipeline::Frame f = pipe.sense();
        Vec s = encode_rl_state(pipe, f, FeatureMode::None);
        while (!pipe.world.done()) {
            const int a = agent.act(s, opt.train);
            const env::StepResult sr = pipe.world.step(static_cast<env::Action>(a));
            Vec s_next(s.size(), 0.0);
            if (!sr.done) {
                f = pipe.sense();
                s_next = encode_rl_state(pipe, f, FeatureMode::None);
            }
            if (opt.train) {
                agent.replay.push({s, a, sr.reward, s_next, sr.done});
                agent.train_step();
            }
            s = std::move(s_next);
        }
        log.append(make_record(e, seed, pipe.world.cum_reward(), pipe.world_cfg.episode_len,
                               opt.clock() - t0));
    }
    if (!opt.save_params_dir.empty())
        neural::save_params(agent.online.net().params(), opt.save_params_dir + "/dqn.params");
    return log;
}

FeatureMode mode_for(Variant v) {
    switch (v) {
        case Variant::A3cPresence: return FeatureMode::Presence;
        case Variant::A3cArea: return FeatureMode::AreaStack;
        default: return FeatureMode::None;
    }
}

MetricsLog run_a3c_family(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    const FeatureMode mode = mode_for(cfg.variant);
    const a3c::WorkerConfig wc = worker_config_from(cfg.raw);
    const std::vector<int> hidden = int_list(cfg.raw, "net.hidden", {128, 64});

    auto probe = std::make_unique<PipelineAdapter>(cfg, mix_seed(seed, 0xA0), mode);
    const int input = rl_state_size(probe->pipeline(), mode);
    Rng init_rng(mix_seed(seed, 0xA3C0));
    a3c::PolicyValueNet net(input, hidden, env::kNumActions, init_rng);
    if (!opt.params_dir.empty()) load_pv(net, opt.params_dir);

    const std::int64_t t0 = opt.clock();
    MetricsLog log;

    if (opt.train) {
        a3c::SharedParams shared(net, wc.optimizer);
        std::vector<std::unique_ptr<a3c::Worker>> workers;
        for (int w = 0; w < wc.n_workers; ++w) {
            auto adapter = std::make_unique<PipelineAdapter>(cfg, mix_seed(seed, 0xA0 + w), mode);
            workers.push_back(std::make_unique<a3c::Worker>(std::move(adapter), net,
                                                            mix_seed(seed, 0xB0 + w)));
        }
        const bool deterministic = !cfg.raw.get_bool("a3c.threads", false);
        const a3c::TrainResult res = a3c::train(shared, workers, wc, cfg.episodes, deterministic);
        shared.load_into(net);
        const std::int64_t elapsed = opt.clock() - t0;
        const std::int64_t per_ep =
            res.episode_rewards.empty()
                ? 0
                : elapsed / static_cast<std::int64_t>(res.episode_rewards.size());
        const env::WorldConfig world_cfg = world_config_from(cfg.raw);
        for (std::size_t e = 0; e < res.episode_rewards.size(); ++e)
            log.append(make_record(static_cast<long>(e), seed, res.episode_rewards[e],
                                   world_cfg.episode_len, per_ep));
    } else {
        // Evaluation: sample the policy, no updates.
        PipelineAdapter adapter(cfg, mix_seed(seed, 0xA0), mode);
        Rng rng(mix_seed(seed, 0xE7A1));
        const env::WorldConfig world_cfg = world_config_from(cfg.raw);
        for (long e = 0; e < cfg.episodes; ++e) {
            const std::int64_t ts = opt.clock();
            Vec s = adapter.reset(episode_seed(seed, e));
            double total = 0.0;
            bool done = false;
            while (!done) {
                const a3c::PolicyValueNet::Output out = net.forward(s);
                const int a = rl::sample_from(out.pi, rng);
                auto [next, reward, fin] = adapter.step(a);
                total += reward;
                s = std::move(next);
                done = fin;
            }
            log.append(make_record(e, seed, total, world_cfg.episode_len, opt.clock() - ts));
        }
    }

    if (!opt.save_params_dir.empty()) save_pv(net, opt.save_params_dir);
    return log;
}

MetricsLog run_drlek(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    Pipeline pipe(cfg, seed);
    const a3c::WorkerConfig wc = worker_config_from(cfg.raw);
    const std::vector<int> hidden = int_list(cfg.raw, "net.hidden", {128, 64});
    const int rl_input = rl_state_size(pipe, FeatureMode::AreaStack);
    const int meta_input = 3 * cfg.k * cfg.k;

    Rng init_rng(mix_seed(seed, 0xDE1));
    a3c::PolicyValueNet pv(rl_input, hidden, env::kNumActions, init_rng);
    knowledge::MetaLearner meta(meta_config_from(cfg.raw, meta_input, {100, 100, 100}),
                                mix_seed(seed, 0xDE2));
    selector::SelectorDqn sel(selector_config_from(cfg.raw), mix_seed(seed, 0xDE3));
    if (!opt.params_dir.empty()) {
        load_pv(pv, opt.params_dir);
        load_dueling(meta.online(), opt.params_dir, "meta");
        sel.net().net().params() = neural::load_params(opt.params_dir + "/selector.params");
    }

    // The policy-value module trains on the executed trajectory as a single
    // worker through the shared-parameter surface.
    a3c::SharedParams shared(pv, wc.optimizer);
    Rng pi_rng(mix_seed(seed, 0xDE4));

    const std::size_t pair_size = 2 * env::kNumActions;
    MetricsLog log;

    for (long e = 0; e < cfg.episodes; ++e) {
        const std::int64_t t0 = opt.clock();
        pipe.begin_episode(episode_seed(seed, e));
        std::vector<selector::SelectionEvent> events;

        Pipeline::Frame f = pipe.sense();
        Vec s_rl = encode_rl_state(pipe, f, FeatureMode::AreaStack);
        Vec s_meta = pipe.meta_state();
        a3c::Trajectory segment;
        std::optional<rl::Transition> pending_sel;
        shared.load_into(pv);

        while (!pipe.world.done()) {
            // Segment boundary: bootstrap from the current state value.
            if (opt.train && static_cast<int>(segment.steps.size()) >= wc.t_max) {
                segment.bootstrap_value = pv.forward(s_rl).v;
                shared.apply_update(a3c::actor_critic_grads(segment, pv, wc).grads);
                shared.load_into(pv);
                segment = a3c::Trajectory{};
            }

            const int a1 = meta.decide(s_meta, opt.train);
            const a3c::PolicyValueNet::Output out = pv.forward(s_rl);
            const int a2 = rl::sample_from(out.pi, pi_rng);
            const selector::IndicatorPair pair =
                selector::encode(static_cast<env::Action>(a1), static_cast<env::Action>(a2));

            if (opt.train && pending_sel) {
                pending_sel->s_next = pair;
                sel.remember(*pending_sel);
                sel.update();
                pending_sel.reset();
            }

            const env::Action chosen =
                opt.train ? sel.select(pair) : sel.select(pair, sel.config().tau.end);
            const env::StepResult sr = pipe.world.step(chosen);
            events.push_back({static_cast<env::Action>(a1), static_cast<env::Action>(a2), chosen});

            Vec s_rl_next(s_rl.size(), 0.0), s_meta_next(s_meta.size(), 0.0);
            if (!sr.done) {
                f = pipe.sense();
                s_rl_next = encode_rl_state(pipe, f, FeatureMode::AreaStack);
                s_meta_next = pipe.meta_state();
            }

            if (opt.train) {
                // All learners update from the executed step (off-policy for
                // the Q-learners, executed-action gradient for the policy).
                meta.remember({s_meta, static_cast<int>(chosen), sr.reward, s_meta_next, sr.done});
                meta.train_step();
                segment.steps.push_back({s_rl, static_cast<int>(chosen), sr.reward});
                if (sr.done) {
                    segment.hit_terminal = true;
                    segment.bootstrap_value = 0.0;
                    shared.apply_update(a3c::actor_critic_grads(segment, pv, wc).grads);
                    shared.load_into(pv);
                    segment = a3c::Trajectory{};
                    rl::Transition last{pair, static_cast<int>(chosen), sr.reward,
                                        Vec(pair_size, 0.0), true};
                    sel.remember(std::move(last));
                    sel.update();
                } else {
                    pending_sel = rl::Transition{pair, static_cast<int>(chosen), sr.reward, {},
                                                 false};
                }
            }

            s_rl = std::move(s_rl_next);
            s_meta = std::move(s_meta_next);
        }

        const selector::SelectionShares shares = selector::selection_share_stats(events);
        EpisodeRecord rec = make_record(e, seed, pipe.world.cum_reward(),
                                        pipe.world_cfg.episode_len, opt.clock() - t0);
        rec.share_a1 = shares.a1;
        rec.share_a2 = shares.a2;
        rec.share_other = shares.other;
        log.append(rec);
    }

    if (!opt.save_params_dir.empty()) {
        save_pv(pv, opt.save_params_dir);
        save_dueling(meta.online(), opt.save_params_dir, "meta");
        neural::save_params(sel.net().net().params(), opt.save_params_dir + "/selector.params");
    }
    return log;
}

} // namespace

MetricsLog run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                          const RunOptions& options) {
    switch (cfg.variant) {
        case Variant::Random: return run_random(cfg, seed, options);
        case Variant::Planner: return run_planner(cfg, seed, options);
        case Variant::Meta: return run_dueling_learner(cfg, seed, options, true);
        case Variant::DuelingDdqn: return run_dueling_learner(cfg, seed, options, false);
        case Variant::Dqn: return run_dqn(cfg, seed, options);
        case Variant::A3c:
        case Variant::A3cPresence:
        case Variant::A3cArea: return run_a3c_family(cfg, seed, options);
        case Variant::DrlEk: return run_drlek(cfg, seed, options);
    }
    throw std::runtime_error("run_experiment: unknown variant");
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                                const RunOptions& options) {
    const std::vector<long> areas = cfg.raw.get_int_list("sweep.areas", {4, 9, 16});
    const std::vector<long> layer_counts = cfg.raw.get_int_list("sweep.layers", {1, 2, 3});
    const std::vector<long> sizes = cfg.raw.get_int_list("sweep.sizes", {25, 50, 100});
    const long eval_episodes = cfg.raw.get_int("sweep.eval_episodes", 200);

    std::vector<SweepRow> rows;
    for (long areas_n : areas) {
        const int k = static_cast<int>(std::llround(std::sqrt(static_cast<double>(areas_n))));
        if (k * k != areas_n)
            throw std::runtime_error("sweep: areas must be perfect squares, got " +
                                     std::to_string(areas_n));
        for (long layers : layer_counts) {
            for (long size : sizes) {
                ExperimentConfig cell = cfg;
                cell.variant = Variant::Meta;
                cell.k = k;
                std::ostringstream hidden;
                for (long i = 0; i < layers; ++i) hidden << (i ? "," : "") << size;
                cell.raw.set("meta.hidden", hidden.str());

                RunOptions train_opt = options;
                train_opt.train = true;
                const std::string cell_dir = cfg.out_dir + "/sweep_k" + std::to_string(k) + "_l" +
                                             std::to_string(layers) + "_s" + std::to_string(size);
                std::filesystem::create_directories(cell_dir);
                train_opt.save_params_dir = cell_dir;
                run_experiment(cell, seed, train_opt);

                ExperimentConfig eval_cfg = cell;
                eval_cfg.episodes = eval_episodes;
                RunOptions eval_opt = options;
                eval_opt.train = false;
                eval_opt.params_dir = cell_dir;
                const MetricsLog eval_log = run_experiment(eval_cfg, mix_seed(seed, 0xE7), eval_opt);

                const std::vector<CompareRow> stat =
                    compare_table({{"cell", eval_log}}, eval_episodes);
                rows.push_back({static_cast<int>(areas_n), static_cast<int>(layers),
                                static_cast<int>(size), stat[0].mean, stat[0].stddev});
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "areas,layers,size,mean_reward,std\n";
    for (const SweepRow& r : rows)
        out << r.areas << ',' << r.layers << ',' << r.size << ',' << format_double(r.mean_reward)
            << ',' << format_double(r.stddev) << '\n';
    return out.str();
}

} // namespace forager::harness
