#include "forager/rl/algorithms.hpp"

#include "forager/neural/net.hpp"

namespace forager::rl {

Vec discounted_return(const Vec& rewards, double gamma) {
    Vec out(rewards.size(), 0.0);
    double acc = 0.0;
    for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
        acc = rewards[t] + gamma * acc;
        out[t] = acc;
    }
    return out;
}

double td_target(double r, double gamma, const Vec& q_next, TdMode mode, bool done,
                 const Vec& q_online_next) {
    if (done) return r;
    if (q_next.empty()) throw std::invalid_argument("td_target: q_next empty");
    if (mode == TdMode::Max) {
        return r + gamma * *std::max_element(q_next.begin(), q_next.end());
    }
    if (q_online_next.size() != q_next.size())
        throw std::invalid_argument("td_target: double mode needs online values");
    const int a_star = static_cast<int>(
        std::max_element(q_online_next.begin(), q_online_next.end()) - q_online_next.begin());
    return r + gamma * q_next[a_star];
}

void q_learning_update(QTable& table, int s, int a, double r, int s_next, bool done,
                       double alpha, double gamma) {
    const Vec& next = table.row(s_next);
    const double y = td_target(r, gamma, next, TdMode::Max, done);
    double& q = table.row(s)[a];
    q += alpha * (y - q);
}

Vec dueling_combine(double v, const Vec& advantages, DuelingMode mode) {
    if (advantages.empty()) throw std::invalid_argument("dueling_combine: empty advantages");
    double agg;
    if (mode == DuelingMode::Max) {
        agg = *std::max_element(advantages.begin(), advantages.end());
    } else {
        agg = 0.0;
        for (double a : advantages) agg += a;
        agg /= static_cast<double>(advantages.size());
    }
    Vec q(advantages.size());
    for (std::size_t i = 0; i < advantages.size(); ++i) q[i] = v + advantages[i] - agg;
    return q;
}

Vec boltzmann_probs(const Vec& q, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("boltzmann_probs: tau must be positive");
    Vec scaled(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) scaled[i] = q[i] / tau;
    return neural::softmax(scaled);
}

int sample_from(const Vec& probs, Rng& rng) {
    const double u = rng.uniform01();
    double c = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        c += probs[i];
        if (u < c) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

Vec advantage(const Vec& q, double v) {
    Vec a(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) a[i] = q[i] - v;
    return a;
}

} // namespace forager::rl
