#pragma once

#include "forager/rl/qnet.hpp"
#include "forager/rl/types.hpp"

namespace forager::knowledge {

// Dueling double-Q learner over the filtered feature stack. Defaults follow
// the shipped setup: three rectifier layers of 100, mean-mode dueling head,
// adam at 1e-3, batches of 32.
struct MetaConfig {
    int input_size = 27;
    std::vector<int> hidden{100, 100, 100};
    int n_actions = 6;
    neural::OptConfig optimizer = neural::adam(1e-3);
    rl::RLSettings settings{1.0, 500, 32};
    std::size_t replay_capacity = 100000;
    rl::LinearSchedule epsilon{1.0, 0.05, 50000};
};

class MetaLearner {
public:
    MetaLearner(const MetaConfig& cfg, std::uint64_t seed);

    // Epsilon-greedy over the dueling Q-values; greedy when explore=false.
    int decide(const rl::Vec& features, bool explore);

    void remember(rl::Transition t) { replay_.push(std::move(t)); }

    // One double-Q step on an explicit batch; returns the TD loss.
    double update_batch(const std::vector<rl::Transition>& batch);

    // Samples a batch from replay when enough data is buffered.
    bool train_step();

    const rl::DuelingNet& online() const { return online_; }
    rl::DuelingNet& online() { return online_; }
    const rl::ReplayMemory& replay() const { return replay_; }
    const MetaConfig& config() const { return cfg_; }
    long updates() const { return updates_; }
    double current_epsilon() const { return cfg_.epsilon.value(action_count_); }

private:
    MetaConfig cfg_;
    rl::DuelingNet online_;
    rl::DuelingNet target_;
    rl::DuelingOpt opt_;
    rl::ReplayMemory replay_;
    Rng rng_;
    long updates_ = 0;
    long action_count_ = 0;
};

} // namespace forager::knowledge
