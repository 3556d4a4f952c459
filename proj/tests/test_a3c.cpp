#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forager/a3c/a3c.hpp"
#include "support/oracles.hpp"

using namespace forager;
using a3c::PolicyValueNet;
using a3c::Trajectory;
using a3c::Vec;
using a3c::WorkerConfig;

namespace {

// Single-state two-armed bandit: action 0 pays 1, action 1 pays 0; episodes
// are one step long.
class Bandit : public a3c::EnvAdapter {
public:
    Vec reset(std::uint64_t) override { return {1.0}; }
    std::tuple<Vec, double, bool> step(int action) override {
        return {{1.0}, action == 0 ? 1.0 : 0.0, true};
    }
};

// Deterministic 3-step corridor with reward 1 at the end.
class Corridor : public a3c::EnvAdapter {
public:
    Vec reset(std::uint64_t) override {
        pos_ = 0;
        return encode();
    }
    std::tuple<Vec, double, bool> step(int action) override {
        if (action == 0) pos_ = std::min(3, pos_ + 1);
        const bool done = pos_ == 3;
        return {encode(), done ? 1.0 : 0.0, done};
    }

private:
    Vec encode() const {
        Vec s(4, 0.0);
        s[pos_] = 1.0;
        return s;
    }
    int pos_ = 0;
};

PolicyValueNet tiny_net(int input, std::uint64_t seed, int n_actions = 2) {
    Rng rng(seed);
    return PolicyValueNet(input, {8}, n_actions, rng);
}

} // namespace

TEST_CASE("encode_state: feature-free length is 3x the frame size") {
    a3c::ObsStack stack(10);
    CHECK(a3c::encode_state(stack, std::nullopt).size() == 30);
    const Vec features(27, 0.5);
    CHECK(a3c::encode_state(stack, features).size() == 30 + 27);
}

TEST_CASE("encode_state: deterministic for identical inputs; stack shifts history") {
    a3c::ObsStack stack(3);
    stack.push({1.0, 2.0, 3.0});
    const Vec a = a3c::encode_state(stack, std::nullopt);
    const Vec b = a3c::encode_state(stack, std::nullopt);
    CHECK(a == b);
    CHECK(a[0] == 1.0);
    CHECK(a[3] == 0.0); // history zero-filled
    stack.push({4.0, 5.0, 6.0});
    const Vec c = a3c::encode_state(stack, std::nullopt);
    CHECK(c[0] == 4.0);
    CHECK(c[3] == 1.0);
    CHECK_THROWS(stack.push({1.0})); // length drift
}

TEST_CASE("policy head: valid distribution at every forward pass") {
    PolicyValueNet net = tiny_net(4, 9, 3);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        Vec s(4);
        for (double& v : s) v = rng.uniform(-2.0, 2.0);
        const auto out = net.forward(s);
        double sum = 0.0;
        for (double p : out.pi) {
            CHECK(p > 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("rollout: terminal at the first step gives one transition, bootstrap 0") {
    WorkerConfig cfg;
    cfg.t_max = 5;
    std::vector<double> rewards;
    a3c::Worker w(std::make_unique<Bandit>(), tiny_net(1, 3), 42);
    const Trajectory traj = a3c::rollout(w, cfg, &rewards);
    CHECK(traj.steps.size() == 1);
    CHECK(traj.hit_terminal);
    CHECK(traj.bootstrap_value == 0.0);
    CHECK(rewards.size() == 1);
}

TEST_CASE("rollout: exactly t_max transitions without a terminal") {
    WorkerConfig cfg;
    cfg.t_max = 2; // corridor takes 3 correct moves, so no terminal in one rollout
    a3c::Worker w(std::make_unique<Corridor>(), tiny_net(4, 3), 42);
    std::vector<double> rewards;
    const Trajectory traj = a3c::rollout(w, cfg, &rewards);
    CHECK(traj.steps.size() == 2);
}

TEST_CASE("rollout: identical seeds reproduce the trajectory") {
    WorkerConfig cfg;
    for (int copy = 0; copy < 2; ++copy) {
        // fresh identical workers
    }
    a3c::Worker w1(std::make_unique<Corridor>(), tiny_net(4, 3), 42);
    a3c::Worker w2(std::make_unique<Corridor>(), tiny_net(4, 3), 42);
    std::vector<double> r1, r2;
    const Trajectory t1 = a3c::rollout(w1, cfg, &r1);
    const Trajectory t2 = a3c::rollout(w2, cfg, &r2);
    REQUIRE(t1.steps.size() == t2.steps.size());
    for (std::size_t i = 0; i < t1.steps.size(); ++i) {
        CHECK(t1.steps[i].action == t2.steps[i].action);
        CHECK(t1.steps[i].reward == t2.steps[i].reward);
    }
}

TEST_CASE("actor_critic_grads: zero advantage kills the policy gradient") {
    // Identity-free check: single step, reward chosen so R = V(s).
    PolicyValueNet net = tiny_net(2, 7);
    WorkerConfig cfg;
    cfg.entropy_coeff = 0.0;
    cfg.value_loss_coeff = 0.5;
    Trajectory traj;
    const Vec s = {0.4, -0.6};
    const double v = net.forward(s).v;
    traj.steps.push_back({s, 1, v}); // terminal reward equal to the value
    traj.hit_terminal = true;
    traj.bootstrap_value = 0.0;
    const auto res = a3c::actor_critic_grads(traj, net, cfg);
    CHECK(res.policy_loss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.value_loss == doctest::Approx(0.0).epsilon(1e-12));
    // With zero advantage and zero entropy weight the policy head bias
    // receives no gradient.
    for (double g : res.grads.policy.layers.back().b) CHECK(g == doctest::Approx(0.0));
}

TEST_CASE("actor_critic_grads: single terminal step advantage is r - V(s)") {
    PolicyValueNet net = tiny_net(2, 8);
    WorkerConfig cfg;
    Trajectory traj;
    const Vec s = {1.0, 0.0};
    traj.steps.push_back({s, 0, 2.0});
    traj.hit_terminal = true;
    const double v = net.forward(s).v;
    const auto res = a3c::actor_critic_grads(traj, net, cfg);
    // policy_loss = -log(pi_0) * (2 - V)
    const double adv = 2.0 - v;
    const double expected = -std::log(net.forward(s).pi[0]) * adv;
    CHECK(res.policy_loss == doctest::Approx(expected));
    CHECK(res.value_loss == doctest::Approx(adv * adv));
}

TEST_CASE("actor_critic_grads matches finite differences on the combined loss") {
    PolicyValueNet net = tiny_net(3, 21);
    WorkerConfig cfg;
    cfg.gamma = 0.9;
    cfg.entropy_coeff = 0.013;
    cfg.value_loss_coeff = 0.37;

    Trajectory traj;
    traj.steps.push_back({{0.2, -0.1, 0.5}, 1, 0.3});
    traj.steps.push_back({{-0.4, 0.8, 0.1}, 0, -0.2});
    traj.hit_terminal = false;
    traj.bootstrap_value = 0.25;

    const auto res = a3c::actor_critic_grads(traj, net, cfg);

    // Freeze returns and advantages at their base values, then re-evaluate
    // the scalar loss the gradients claim to descend.
    std::vector<double> returns(traj.steps.size());
    double acc = traj.bootstrap_value;
    for (int t = static_cast<int>(traj.steps.size()) - 1; t >= 0; --t) {
        acc = traj.steps[t].reward + cfg.gamma * acc;
        returns[t] = acc;
    }
    std::vector<double> adv(traj.steps.size());
    for (std::size_t t = 0; t < traj.steps.size(); ++t)
        adv[t] = returns[t] - net.forward(traj.steps[t].state).v;

    const auto loss = [&] {
        double l = 0.0;
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const auto out = net.forward(traj.steps[t].state);
            l += -std::log(out.pi[traj.steps[t].action]) * adv[t];
            double h = 0.0;
            for (double p : out.pi) h -= p * std::log(p);
            l -= cfg.entropy_coeff * h;
            l += cfg.value_loss_coeff * (returns[t] - out.v) * (returns[t] - out.v);
        }
        return l;
    };

    for (auto [params, g] :
         {std::pair{&net.trunk().params(), &res.grads.trunk},
          std::pair{&net.policy_head().params(), &res.grads.policy},
          std::pair{&net.value_head().params(), &res.grads.value}}) {
        const auto report =
            oracles::fd_check(oracles::flat_view(*params), oracles::flat_copy(*g), loss);
        CHECK(report.max_rel_err < 1e-4);
    }
}

TEST_CASE("apply_async_update: zero grads keep params, bump version") {
    PolicyValueNet net = tiny_net(2, 30);
    a3c::SharedParams shared(net, neural::rmsprop(1e-3));
    const auto before = shared.snapshot();
    const auto version = shared.apply_update(net.zero_grads());
    const auto after = shared.snapshot();
    CHECK(version == before.version + 1);
    CHECK(after.version == version);
    for (std::size_t li = 0; li < before.trunk.layers.size(); ++li)
        for (std::size_t i = 0; i < before.trunk.layers[li].w.size(); ++i)
            CHECK(after.trunk.layers[li].w[i] == before.trunk.layers[li].w[i]);
}

TEST_CASE("apply_async_update: sequential g,g equals the serialized schedule") {
    PolicyValueNet net = tiny_net(2, 31);
    PolicyValueNet::GradsT g = net.zero_grads();
    for (auto& l : g.trunk.layers)
        for (double& w : l.w) w = 0.01;
    g.policy.layers[0].b[0] = 0.02;
    g.value.layers[0].b[0] = -0.03;

    a3c::SharedParams s1(net, neural::rmsprop(1e-3));
    s1.apply_update(g);
    s1.apply_update(g);

    // Serialized replay: one state, stepping the optimizer twice by hand.
    neural::Params trunk = net.trunk().params();
    neural::Params policy = net.policy_head().params();
    neural::Params value = net.value_head().params();
    neural::OptState ot(neural::rmsprop(1e-3), trunk);
    neural::OptState op(neural::rmsprop(1e-3), policy);
    neural::OptState ov(neural::rmsprop(1e-3), value);
    for (int i = 0; i < 2; ++i) {
        neural::optimizer_step(ot, trunk, g.trunk);
        neural::optimizer_step(op, policy, g.policy);
        neural::optimizer_step(ov, value, g.value);
    }
    const auto snap = s1.snapshot();
    CHECK(snap.version == 2);
    for (std::size_t li = 0; li < trunk.layers.size(); ++li)
        for (std::size_t i = 0; i < trunk.layers[li].w.size(); ++i)
            CHECK(snap.trunk.layers[li].w[i] == doctest::Approx(trunk.layers[li].w[i]).epsilon(1e-15));
}

TEST_CASE("single worker training is bit-reproducible") {
    const auto run = [] {
        WorkerConfig cfg;
        cfg.n_workers = 1;
        cfg.t_max = 3;
        PolicyValueNet net = tiny_net(4, 5);
        a3c::SharedParams shared(net, neural::rmsprop(1e-3));
        std::vector<std::unique_ptr<a3c::Worker>> workers;
        workers.push_back(std::make_unique<a3c::Worker>(std::make_unique<Corridor>(), net, 7));
        const auto res = a3c::train(shared, workers, cfg, 40, true);
        auto snap = shared.snapshot();
        return std::pair{res.episode_rewards, snap.trunk.layers[0].w};
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("policy-gradient sign: bandit converges to the paying arm") {
    WorkerConfig cfg;
    cfg.n_workers = 1;
    cfg.t_max = 1;
    cfg.entropy_coeff = 0.01;
    cfg.optimizer = neural::rmsprop(5e-3);
    PolicyValueNet net = tiny_net(1, 12);
    a3c::SharedParams shared(net, cfg.optimizer);
    std::vector<std::unique_ptr<a3c::Worker>> workers;
    workers.push_back(std::make_unique<a3c::Worker>(std::make_unique<Bandit>(), net, 99));
    a3c::train(shared, workers, cfg, 500, true);
    shared.load_into(net);
    CHECK(net.forward({1.0}).pi[0] > 0.9);
}

TEST_CASE("three threaded workers: version counts every update, params stay finite") {
    WorkerConfig cfg;
    cfg.n_workers = 3;
    cfg.t_max = 2;
    PolicyValueNet net = tiny_net(4, 40);
    a3c::SharedParams shared(net, neural::rmsprop(1e-3));
    std::vector<std::unique_ptr<a3c::Worker>> workers;
    for (int w = 0; w < 3; ++w)
        workers.push_back(
            std::make_unique<a3c::Worker>(std::make_unique<Corridor>(), net, 100 + w));
    const auto res = a3c::train(shared, workers, cfg, 60, false);
    CHECK(res.episode_rewards.size() >= 60);
    CHECK(shared.version() == res.updates);
    shared.load_into(net);
    const auto out = net.forward({1.0, 0.0, 0.0, 0.0});
    double sum = 0.0;
    for (double p : out.pi) {
        CHECK(std::isfinite(p));
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}
