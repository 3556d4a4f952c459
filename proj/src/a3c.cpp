#include "forager/a3c/a3c.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "forager/rl/algorithms.hpp"

namespace forager::a3c {

neural::NetSpec PolicyValueNet::trunk_spec(int input, const std::vector<int>& hidden) {
    if (hidden.empty())
        throw std::invalid_argument("PolicyValueNet: need at least one hidden layer");
    return neural::make_mlp(input, std::vector<int>(hidden.begin(), hidden.end() - 1),
                            hidden.back(), neural::Activation::Rectifier);
}

PolicyValueNet::PolicyValueNet(int input, const std::vector<int>& hidden, int n_actions, Rng& rng)
    : trunk_(trunk_spec(input, hidden), rng),
      policy_(neural::make_mlp(hidden.back(), {}, n_actions, neural::Activation::SoftmaxHead), rng),
      value_(neural::make_mlp(hidden.back(), {}, 1), rng) {}

PolicyValueNet::Output PolicyValueNet::forward(const Vec& state) const {
    const Vec h = trunk_.output(state);
    return {policy_.output(h), value_.output(h)[0]};
}

void PolicyValueNet::backward(const Vec& state, const Vec& dpi, double dv, GradsT& grads) const {
    const neural::ForwardCache tc = trunk_.forward(state);
    const neural::ForwardCache pc = policy_.forward(tc.output());
    const neural::ForwardCache vc = value_.forward(tc.output());
    Vec dh = policy_.backward(pc, dpi, grads.policy);
    const Vec dh_v = value_.backward(vc, Vec{dv}, grads.value);
    for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dh_v[i];
    trunk_.backward(tc, dh, grads.trunk);
}

void ObsStack::reset() {
    for (Vec& f : frames_) std::fill(f.begin(), f.end(), 0.0);
}

void ObsStack::push(const Vec& frame) {
    if (frame.size() != frame_size_) throw std::invalid_argument("ObsStack: frame size drift");
    frames_[2] = frames_[1];
    frames_[1] = frames_[0];
    frames_[0] = frame;
}

Vec ObsStack::flattened() const {
    Vec out;
    out.reserve(flat_size());
    for (const Vec& f : frames_) out.insert(out.end(), f.begin(), f.end());
    return out;
}

Vec encode_state(const ObsStack& stack, const std::optional<Vec>& features) {
    Vec out = stack.flattened();
    if (features) out.insert(out.end(), features->begin(), features->end());
    return out;
}

SharedParams::SharedParams(const PolicyValueNet& initial, const neural::OptConfig& opt)
    : trunk_(initial.trunk().params()),
      policy_(initial.policy_head().params()),
      value_(initial.value_head().params()),
      opt_trunk_(opt, trunk_),
      opt_policy_(opt, policy_),
      opt_value_(opt, value_) {}

SharedParams::Snapshot SharedParams::snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return {trunk_, policy_, value_, version_};
}

std::uint64_t SharedParams::version() const {
    std::lock_guard<std::mutex> lock(mu_);
    return version_;
}

std::uint64_t SharedParams::apply_update(const PolicyValueNet::GradsT& grads) {
    std::lock_guard<std::mutex> lock(mu_);
    neural::optimizer_step(opt_trunk_, trunk_, grads.trunk);
    neural::optimizer_step(opt_policy_, policy_, grads.policy);
    neural::optimizer_step(opt_value_, value_, grads.value);
    return ++version_;
}

void SharedParams::load_into(PolicyValueNet& net) const {
    std::lock_guard<std::mutex> lock(mu_);
    net.trunk().params() = trunk_;
    net.policy_head().params() = policy_;
    net.value_head().params() = value_;
}

AcGradResult actor_critic_grads(const Trajectory& traj, const PolicyValueNet& net,
                                const WorkerConfig& cfg) {
    if (traj.steps.empty()) throw std::invalid_argument("actor_critic_grads: empty trajectory");
    AcGradResult res;
    res.grads = net.zero_grads();

    const std::size_t n = traj.steps.size();
    std::vector<PolicyValueNet::Output> outs(n);
    for (std::size_t t = 0; t < n; ++t) outs[t] = net.forward(traj.steps[t].state);

    // Bootstrapped n-step returns, computed once and then held constant.
    std::vector<double> returns(n);
    double acc = traj.bootstrap_value;
    for (int t = static_cast<int>(n) - 1; t >= 0; --t) {
        acc = traj.steps[t].reward + cfg.gamma * acc;
        returns[t] = acc;
    }

    for (std::size_t t = 0; t < n; ++t) {
        const Vec& pi = outs[t].pi;
        const double v = outs[t].v;
        const int a = traj.steps[t].action;
        const double adv = returns[t] - v;

        res.policy_loss += -std::log(pi[a]) * adv;
        double ent = 0.0;
        for (double p : pi) ent -= p * std::log(p);
        res.entropy += ent;
        const double vdiff = returns[t] - v;
        res.value_loss += vdiff * vdiff;

        // dL/dpi for -log(pi_a)*adv - entropy_coeff*H(pi).
        Vec dpi(pi.size(), 0.0);
        dpi[a] += -adv / pi[a];
        for (std::size_t i = 0; i < pi.size(); ++i)
            dpi[i] += cfg.entropy_coeff * (std::log(pi[i]) + 1.0);
        const double dv = -2.0 * cfg.value_loss_coeff * vdiff;

        net.backward(traj.steps[t].state, dpi, dv, res.grads);
    }
    return res;
}

Trajectory rollout(Worker& worker, const WorkerConfig& cfg,
                   std::vector<double>* finished_rewards) {
    Trajectory traj;
    if (!worker.episode_open) {
        const std::uint64_t seed =
            mix_seed(worker.seed_base, static_cast<std::uint64_t>(worker.episodes_started));
        worker.state = worker.env->reset(seed);
        worker.episode_open = true;
        worker.episode_reward = 0.0;
        ++worker.episodes_started;
    }

    for (int t = 0; t < cfg.t_max; ++t) {
        const PolicyValueNet::Output out = worker.local.forward(worker.state);
        const int action = rl::sample_from(out.pi, worker.rng);
        auto [next, reward, done] = worker.env->step(action);
        traj.steps.push_back({worker.state, action, reward});
        worker.episode_reward += reward;
        worker.state = std::move(next);
        if (done) {
            traj.hit_terminal = true;
            worker.episode_open = false;
            if (finished_rewards) finished_rewards->push_back(worker.episode_reward);
            break;
        }
    }
    traj.bootstrap_value = traj.hit_terminal ? 0.0 : worker.local.forward(worker.state).v;
    return traj;
}

namespace {

// One rollout + one shared update; returns true if an episode completed.
bool worker_iteration(SharedParams& shared, Worker& worker, const WorkerConfig& cfg,
                      std::vector<double>& rewards_out, std::uint64_t& updates) {
    shared.load_into(worker.local);
    const std::size_t before = rewards_out.size();
    const Trajectory traj = rollout(worker, cfg, &rewards_out);
    const AcGradResult res = actor_critic_grads(traj, worker.local, cfg);
    shared.apply_update(res.grads);
    ++updates;
    return rewards_out.size() > before;
}

} // namespace

TrainResult train(SharedParams& shared, std::vector<std::unique_ptr<Worker>>& workers,
                  const WorkerConfig& cfg, long episode_budget, bool deterministic) {
    TrainResult result;
    if (workers.empty()) throw std::invalid_argument("train: no workers");

    if (deterministic) {
        long completed = 0;
        std::size_t w = 0;
        while (completed < episode_budget) {
            if (worker_iteration(shared, *workers[w], cfg, result.episode_rewards,
                                 result.updates))
                ++completed;
            w = (w + 1) % workers.size();
        }
        return result;
    }

    std::atomic<long> completed{0};
    std::atomic<std::uint64_t> updates{0};
    std::mutex rewards_mu;
    std::vector<std::thread> threads;
    threads.reserve(workers.size());
    for (auto& worker : workers) {
        threads.emplace_back([&, wp = worker.get()] {
            std::vector<double> local_rewards;
            while (completed.load() < episode_budget) {
                std::uint64_t u = 0;
                local_rewards.clear();
                const bool finished = worker_iteration(shared, *wp, cfg, local_rewards, u);
                updates += u;
                if (finished) {
                    completed += static_cast<long>(local_rewards.size());
                    std::lock_guard<std::mutex> lock(rewards_mu);
                    result.episode_rewards.insert(result.episode_rewards.end(),
                                                  local_rewards.begin(), local_rewards.end());
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    result.updates = updates.load();
    return result;
}

} // namespace forager::a3c
