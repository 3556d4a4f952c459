#pragma once

#include "forager/env/world.hpp"
#include "forager/rl/qnet.hpp"
#include "forager/rl/types.hpp"

namespace forager::selector {

// Concatenated one-hot encodings of the two proposed actions, optionally
// followed by an extra feature block (off by default).
using IndicatorPair = rl::Vec;

IndicatorPair encode(env::Action a1, env::Action a2);

struct SelectorConfig {
    std::vector<int> hidden{50, 50};
    std::size_t replay_capacity = 1000000;
    rl::LinearSchedule tau{1.0, 0.1, 50000};
    rl::RLSettings settings{1.0, 500, 32};
    neural::OptConfig optimizer = neural::rmsprop(1e-3);
    bool append_features = false;
    int feature_size = 0; // used only when append_features is set
};

class SelectorDqn {
public:
    SelectorDqn(const SelectorConfig& cfg, std::uint64_t seed);

    int input_size() const { return online_.input_size(); }

    // Boltzmann draw over the Q-values of the pair; the outcome is free to
    // differ from both proposals.
    env::Action select(const IndicatorPair& input, double tau);
    env::Action select(const IndicatorPair& input) { return select(input, current_tau()); }

    void remember(rl::Transition t) { memory_.push(std::move(t)); }

    // One max-mode DQN step on a replay batch. Returns false (and changes
    // nothing) while the memory holds fewer than batch_size transitions.
    bool update();

    double current_tau() const { return cfg_.tau.value(selections_); }
    const rl::ReplayMemory& memory() const { return memory_; }
    rl::MlpQNet& net() { return online_; }
    const rl::MlpQNet& net() const { return online_; }
    const SelectorConfig& config() const { return cfg_; }
    long updates() const { return updates_; }

private:
    SelectorConfig cfg_;
    rl::MlpQNet online_;
    rl::MlpQNet target_;
    neural::OptState opt_;
    rl::ReplayMemory memory_;
    Rng rng_;
    long selections_ = 0;
    long updates_ = 0;
};

struct SelectionEvent {
    env::Action a1; // knowledge module proposal
    env::Action a2; // reinforcement learning module proposal
    env::Action chosen;
};

struct SelectionShares {
    double a1 = 0.0;
    double a2 = 0.0;
    double other = 0.0;
};

// Shares of the executed action matching each proposal; agreement between
// the proposals splits evenly, anything else counts as "other".
SelectionShares selection_share_stats(const std::vector<SelectionEvent>& log);

} // namespace forager::selector
