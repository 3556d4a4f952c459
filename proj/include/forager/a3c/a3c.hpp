#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "forager/neural/net.hpp"
#include "forager/neural/optimizer.hpp"
#include "forager/rng.hpp"

namespace forager::a3c {

using Vec = neural::Vec;

struct WorkerConfig {
    int n_workers = 3;
    int t_max = 5;
    double gamma = 1.0;
    double entropy_coeff = 0.01;
    double value_loss_coeff = 0.5;
    neural::OptConfig optimizer = neural::rmsprop(7e-4);
};

// Policy head (softmax over actions) and value head (scalar) on a shared
// rectifier trunk.
class PolicyValueNet {
public:
    struct GradsT {
        neural::Grads trunk;
        neural::Grads policy;
        neural::Grads value;
    };
    struct Output {
        Vec pi;
        double v = 0.0;
    };

    PolicyValueNet() = default;
    PolicyValueNet(int input, const std::vector<int>& hidden, int n_actions, Rng& rng);

    Output forward(const Vec& state) const;
    int n_actions() const { return policy_.spec().output_size(); }
    int input_size() const { return trunk_.spec().input_size(); }

    GradsT zero_grads() const {
        return {trunk_.zero_grads(), policy_.zero_grads(), value_.zero_grads()};
    }

    neural::Network& trunk() { return trunk_; }
    neural::Network& policy_head() { return policy_; }
    neural::Network& value_head() { return value_; }
    const neural::Network& trunk() const { return trunk_; }
    const neural::Network& policy_head() const { return policy_; }
    const neural::Network& value_head() const { return value_; }

    void backward(const Vec& state, const Vec& dpi, double dv, GradsT& grads) const;

private:
    static neural::NetSpec trunk_spec(int input, const std::vector<int>& hidden);
    neural::Network trunk_;
    neural::Network policy_;
    neural::Network value_;
};

// Three-frame stack of flattened observations; the history window that
// stands in for recurrence.
class ObsStack {
public:
    explicit ObsStack(std::size_t frame_size)
        : frame_size_(frame_size), frames_(3, Vec(frame_size, 0.0)) {}

    void reset();
    void push(const Vec& frame);
    std::size_t frame_size() const { return frame_size_; }
    std::size_t flat_size() const { return 3 * frame_size_; }
    Vec flattened() const; // [t, t-1, t-2]

private:
    std::size_t frame_size_;
    std::vector<Vec> frames_;
};

// Stacked observation followed by the injected feature block (may be empty).
Vec encode_state(const ObsStack& stack, const std::optional<Vec>& features);

// Versioned global parameter store. Snapshot and apply are the only two
// operations; both are atomic with respect to each other.
class SharedParams {
public:
    struct Snapshot {
        neural::Params trunk;
        neural::Params policy;
        neural::Params value;
        std::uint64_t version = 0;
    };

    SharedParams(const PolicyValueNet& initial, const neural::OptConfig& opt);

    Snapshot snapshot() const;
    std::uint64_t version() const;

    // Read-modify-write under the lock; returns the new version.
    std::uint64_t apply_update(const PolicyValueNet::GradsT& grads);

    void load_into(PolicyValueNet& net) const;

private:
    mutable std::mutex mu_;
    neural::Params trunk_, policy_, value_;
    neural::OptState opt_trunk_, opt_policy_, opt_value_;
    std::uint64_t version_ = 0;
};

// Minimal environment surface a worker drives; the harness adapts the real
// simulator and feature pipeline behind it.
class EnvAdapter {
public:
    virtual ~EnvAdapter() = default;
    virtual Vec reset(std::uint64_t episode_seed) = 0;
    virtual std::tuple<Vec, double, bool> step(int action) = 0;
};

struct TrajectoryStep {
    Vec state;
    int action = 0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    double bootstrap_value = 0.0; // 0 when the last step was terminal
    bool hit_terminal = false;
};

struct AcGradResult {
    PolicyValueNet::GradsT grads;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
};

// n-step advantage actor-critic gradients over one trajectory. Advantages
// and returns are treated as constants in the policy term.
AcGradResult actor_critic_grads(const Trajectory& traj, const PolicyValueNet& net,
                                const WorkerConfig& cfg);

struct Worker {
    std::unique_ptr<EnvAdapter> env;
    PolicyValueNet local;
    Rng rng;
    std::uint64_t seed_base = 0;
    long episodes_started = 0;
    bool episode_open = false;
    Vec state;
    double episode_reward = 0.0;

    Worker(std::unique_ptr<EnvAdapter> e, PolicyValueNet net, std::uint64_t seed)
        : env(std::move(e)), local(std::move(net)), rng(mix_seed(seed, 0xA3C)), seed_base(seed) {}
};

// Runs one rollout of at most t_max steps with the worker's local network,
// starting a fresh episode when needed. Appends the total reward of any
// episode finished during the rollout to finished_rewards.
Trajectory rollout(Worker& worker, const WorkerConfig& cfg,
                   std::vector<double>* finished_rewards);

struct TrainResult {
    std::vector<double> episode_rewards; // in completion order
    std::uint64_t updates = 0;
};

// Trains until episode_budget episodes have completed across all workers.
// deterministic=true serializes workers round-robin (bit-reproducible);
// false runs one thread per worker with atomic shared updates.
TrainResult train(SharedParams& shared, std::vector<std::unique_ptr<Worker>>& workers,
                  const WorkerConfig& cfg, long episode_budget, bool deterministic = true);

} // namespace forager::a3c
