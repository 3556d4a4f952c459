#include "forager/selector/selector.hpp"

#include <stdexcept>

namespace forager::selector {

IndicatorPair encode(env::Action a1, env::Action a2) {
    IndicatorPair v(2 * env::kNumActions, 0.0);
    v[static_cast<int>(a1)] = 1.0;
    v[env::kNumActions + static_cast<int>(a2)] = 1.0;
    return v;
}

namespace {

rl::MlpQNet make_selector_net(const SelectorConfig& cfg, std::uint64_t seed) {
    const int input = 2 * env::kNumActions + (cfg.append_features ? cfg.feature_size : 0);
    Rng r(mix_seed(seed, 0x53454c));
    return rl::MlpQNet(input, cfg.hidden, env::kNumActions, r);
}

} // namespace

SelectorDqn::SelectorDqn(const SelectorConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      online_(make_selector_net(cfg, seed)),
      target_(online_),
      opt_(cfg.optimizer, online_.net().params()),
      memory_(cfg.replay_capacity),
      rng_(mix_seed(seed, 0x53454d)) {
    if (cfg_.replay_capacity < static_cast<std::size_t>(cfg_.settings.batch_size))
        throw std::invalid_argument("SelectorConfig: replay capacity below batch size");
}

env::Action SelectorDqn::select(const IndicatorPair& input, double tau) {
    if (static_cast<int>(input.size()) != online_.input_size())
        throw std::invalid_argument("SelectorDqn::select: input size mismatch");
    ++selections_;
    const rl::Vec probs = rl::boltzmann_probs(online_.q(input), tau);
    return static_cast<env::Action>(rl::sample_from(probs, rng_));
}

bool SelectorDqn::update() {
    if (memory_.size() < static_cast<std::size_t>(cfg_.settings.batch_size)) return false;
    const std::vector<rl::Transition> batch = memory_.sample(cfg_.settings.batch_size, rng_);
    neural::Grads grads = online_.zero_grads();
    rl::dqn_loss_and_grad(online_, target_, batch, cfg_.settings, rl::TdMode::Max, grads);
    neural::optimizer_step(opt_, online_.net().params(), grads);
    ++updates_;
    if (updates_ % cfg_.settings.target_sync_period == 0)
        target_.net().params() = online_.net().params();
    return true;
}

SelectionShares selection_share_stats(const std::vector<SelectionEvent>& log) {
    if (log.empty()) throw std::invalid_argument("selection_share_stats: empty log");
    SelectionShares s;
    const double w = 1.0 / static_cast<double>(log.size());
    for (const SelectionEvent& e : log) {
        if (e.chosen == e.a1 && e.chosen == e.a2) {
            s.a1 += 0.5 * w;
            s.a2 += 0.5 * w;
        } else if (e.chosen == e.a1) {
            s.a1 += w;
        } else if (e.chosen == e.a2) {
            s.a2 += w;
        } else {
            s.other += w;
        }
    }
    return s;
}

} // namespace forager::selector
