#include "forager/knowledge/meta.hpp"

#include <stdexcept>

namespace forager::knowledge {

namespace {

rl::DuelingNet make_net(const MetaConfig& cfg, Rng& rng) {
    return rl::DuelingNet(cfg.input_size, cfg.hidden, cfg.n_actions, rl::DuelingMode::Mean, rng);
}

} // namespace

MetaLearner::MetaLearner(const MetaConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      online_([&] {
          Rng r(mix_seed(seed, 0x4d455441));
          return make_net(cfg, r);
      }()),
      target_(online_),
      opt_(cfg.optimizer, online_),
      replay_(cfg.replay_capacity),
      rng_(mix_seed(seed, 0x4d455442)) {
    target_.copy_params_from(online_);
}

int MetaLearner::decide(const rl::Vec& features, bool explore) {
    if (static_cast<int>(features.size()) != cfg_.input_size)
        throw std::invalid_argument("MetaLearner::decide: feature length mismatch");
    const double eps = cfg_.epsilon.value(action_count_);
    if (explore) ++action_count_;
    if (explore && rng_.uniform01() < eps)
        return static_cast<int>(rng_.uniform_int(cfg_.n_actions));
    const rl::Vec q = online_.q(features);
    return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

double MetaLearner::update_batch(const std::vector<rl::Transition>& batch) {
    if (batch.empty()) throw std::invalid_argument("MetaLearner::update_batch: empty batch");
    rl::DuelingNet::GradsT grads = online_.zero_grads();
    const double loss =
        rl::dqn_loss_and_grad(online_, target_, batch, cfg_.settings, rl::TdMode::Double, grads);
    opt_.step(online_, grads);
    ++updates_;
    if (updates_ % cfg_.settings.target_sync_period == 0) target_.copy_params_from(online_);
    return loss;
}

bool MetaLearner::train_step() {
    if (replay_.size() < static_cast<std::size_t>(cfg_.settings.batch_size)) return false;
    update_batch(replay_.sample(cfg_.settings.batch_size, rng_));
    return true;
}

} // namespace forager::knowledge
