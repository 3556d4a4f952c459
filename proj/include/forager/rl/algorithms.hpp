#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "forager/rl/types.hpp"

namespace forager::rl {

// Per-step returns R_t = sum_{t'>=t} gamma^(t'-t) r_{t'}.
Vec discounted_return(const Vec& rewards, double gamma);

enum class TdMode { Max, Double };

// One-step TD target. In Double mode the action is chosen by the online
// network's values (q_online_next) and evaluated on q_next.
double td_target(double r, double gamma, const Vec& q_next, TdMode mode, bool done,
                 const Vec& q_online_next = {});

// Tabular action values keyed by integer state.
class QTable {
public:
    explicit QTable(int n_actions) : n_actions_(n_actions) {}

    Vec& row(int state) {
        auto it = table_.find(state);
        if (it == table_.end()) it = table_.emplace(state, Vec(n_actions_, 0.0)).first;
        return it->second;
    }
    double q(int state, int action) const {
        auto it = table_.find(state);
        return it == table_.end() ? 0.0 : it->second[action];
    }
    int n_actions() const { return n_actions_; }
    int greedy(int state) const {
        auto it = table_.find(state);
        if (it == table_.end()) return 0;
        return static_cast<int>(std::max_element(it->second.begin(), it->second.end()) -
                                it->second.begin());
    }

private:
    int n_actions_;
    std::unordered_map<int, Vec> table_;
};

// Q(s,a) += alpha * (y - Q(s,a)) with a max-mode one-step target.
void q_learning_update(QTable& table, int s, int a, double r, int s_next, bool done,
                       double alpha, double gamma);

enum class DuelingMode { Max, Mean };

// Q_a = V + A_a - agg(A), agg = max or mean.
Vec dueling_combine(double v, const Vec& advantages, DuelingMode mode);

// P(a) proportional to exp(q_a / tau), computed with max-subtraction.
Vec boltzmann_probs(const Vec& q, double tau);

int sample_from(const Vec& probs, Rng& rng);

// A_a = q_a - v.
Vec advantage(const Vec& q, double v);

// Mean-squared TD loss over a batch; gradients flow only through Q(s_i, a_i).
// Net must provide: n_actions(), q(s), and backward_q(s, dLdQ, grads) which
// accumulates into its grads type. Returns the loss.
template <class Net>
double dqn_loss_and_grad(const Net& online, const Net& target,
                         const std::vector<Transition>& batch, const RLSettings& settings,
                         TdMode mode, typename Net::GradsT& grads) {
    if (batch.empty()) throw std::invalid_argument("dqn_loss_and_grad: empty batch");
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    for (const Transition& t : batch) {
        const Vec q_now = online.q(t.s);
        double y;
        if (t.done) {
            y = t.r;
        } else if (mode == TdMode::Double) {
            y = td_target(t.r, settings.gamma, target.q(t.s_next), TdMode::Double, false,
                          online.q(t.s_next));
        } else {
            y = td_target(t.r, settings.gamma, target.q(t.s_next), TdMode::Max, false);
        }
        const double diff = q_now[t.a] - y;
        loss += diff * diff * inv_n;
        Vec dq(q_now.size(), 0.0);
        dq[t.a] = 2.0 * diff * inv_n;
        online.backward_q(t.s, dq, grads);
    }
    return loss;
}

} // namespace forager::rl
