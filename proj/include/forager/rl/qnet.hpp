#pragma once

#include "forager/neural/net.hpp"
#include "forager/neural/optimizer.hpp"
#include "forager/rl/algorithms.hpp"

namespace forager::rl {

// Plain MLP head: one network, identity output over actions.
class MlpQNet {
public:
    using GradsT = neural::Grads;

    MlpQNet() = default;
    MlpQNet(int input, const std::vector<int>& hidden, int n_actions, Rng& rng)
        : net_(neural::make_mlp(input, hidden, n_actions), rng) {}

    int n_actions() const { return net_.spec().output_size(); }
    int input_size() const { return net_.spec().input_size(); }

    Vec q(const Vec& s) const { return net_.output(s); }

    void backward_q(const Vec& s, const Vec& dq, GradsT& grads) const {
        net_.backward(net_.forward(s), dq, grads);
    }

    GradsT zero_grads() const { return net_.zero_grads(); }
    neural::Network& net() { return net_; }
    const neural::Network& net() const { return net_; }

private:
    neural::Network net_;
};

// Shared trunk with separate value and advantage streams, recombined by
// dueling_combine. The streams are single linear layers on the trunk output.
class DuelingNet {
public:
    struct GradsT {
        neural::Grads trunk;
        neural::Grads adv;
        neural::Grads val;
    };
    struct ParamsT {
        neural::Params trunk;
        neural::Params adv;
        neural::Params val;
    };

    DuelingNet() = default;
    DuelingNet(int input, const std::vector<int>& hidden, int n_actions, DuelingMode mode,
               Rng& rng)
        : mode_(mode),
          trunk_(trunk_spec(input, hidden), rng),
          adv_(neural::make_mlp(hidden.back(), {}, n_actions), rng),
          val_(neural::make_mlp(hidden.back(), {}, 1), rng) {}

    int n_actions() const { return adv_.spec().output_size(); }
    int input_size() const { return trunk_.spec().input_size(); }
    DuelingMode mode() const { return mode_; }

    double value(const Vec& s) const { return val_.output(trunk_.output(s))[0]; }
    Vec advantages(const Vec& s) const { return adv_.output(trunk_.output(s)); }

    Vec q(const Vec& s) const {
        const Vec h = trunk_.output(s);
        return dueling_combine(val_.output(h)[0], adv_.output(h), mode_);
    }

    void backward_q(const Vec& s, const Vec& dq, GradsT& grads) const {
        const neural::ForwardCache tc = trunk_.forward(s);
        const Vec& h = tc.output();
        const neural::ForwardCache ac = adv_.forward(h);
        const neural::ForwardCache vc = val_.forward(h);
        const Vec& a = ac.output();

        // Q_b = V + A_b - agg(A). dL/dV = sum(dq); dL/dA depends on agg.
        double sum_dq = 0.0;
        for (double d : dq) sum_dq += d;
        Vec da(a.size());
        if (mode_ == DuelingMode::Mean) {
            const double m = sum_dq / static_cast<double>(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) da[i] = dq[i] - m;
        } else {
            const std::size_t arg =
                static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
            for (std::size_t i = 0; i < a.size(); ++i) da[i] = dq[i] - (i == arg ? sum_dq : 0.0);
        }
        const Vec dv{sum_dq};

        Vec dh = adv_.backward(ac, da, grads.adv);
        const Vec dh_v = val_.backward(vc, dv, grads.val);
        for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dh_v[i];
        trunk_.backward(tc, dh, grads.trunk);
    }

    GradsT zero_grads() const { return {trunk_.zero_grads(), adv_.zero_grads(), val_.zero_grads()}; }

    neural::Network& trunk() { return trunk_; }
    neural::Network& adv_head() { return adv_; }
    neural::Network& val_head() { return val_; }
    const neural::Network& trunk() const { return trunk_; }
    const neural::Network& adv_head() const { return adv_; }
    const neural::Network& val_head() const { return val_; }

    void copy_params_from(const DuelingNet& other) {
        trunk_.params() = other.trunk_.params();
        adv_.params() = other.adv_.params();
        val_.params() = other.val_.params();
    }

private:
    static neural::NetSpec trunk_spec(int input, const std::vector<int>& hidden) {
        if (hidden.empty()) throw std::invalid_argument("DuelingNet: need at least one hidden layer");
        return neural::make_mlp(input, std::vector<int>(hidden.begin(), hidden.end() - 1),
                                hidden.back(), neural::Activation::Rectifier);
    }

    DuelingMode mode_ = DuelingMode::Mean;
    neural::Network trunk_;
    neural::Network adv_;
    neural::Network val_;
};

// Optimizer state for the three parameter groups of a DuelingNet.
struct DuelingOpt {
    neural::OptState trunk;
    neural::OptState adv;
    neural::OptState val;

    DuelingOpt() = default;
    DuelingOpt(const neural::OptConfig& cfg, const DuelingNet& net)
        : trunk(cfg, net.trunk().params()),
          adv(cfg, net.adv_head().params()),
          val(cfg, net.val_head().params()) {}

    void step(DuelingNet& net, const DuelingNet::GradsT& g) {
        neural::optimizer_step(trunk, net.trunk().params(), g.trunk);
        neural::optimizer_step(adv, net.adv_head().params(), g.adv);
        neural::optimizer_step(val, net.val_head().params(), g.val);
    }
};

} // namespace forager::rl
