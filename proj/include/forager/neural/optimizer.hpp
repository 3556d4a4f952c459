#pragma once

#include "forager/neural/net.hpp"

namespace forager::neural {

enum class OptKind { Sgd, RmsProp, Adam };

struct OptConfig {
    OptKind kind = OptKind::Sgd;
    double lr = 1e-2;
    // rmsprop
    double rho = 0.99;
    double eps = 1e-6;
    // adam
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

inline OptConfig sgd(double lr) { return {OptKind::Sgd, lr}; }
inline OptConfig rmsprop(double lr, double rho = 0.99, double eps = 1e-6) {
    OptConfig c{OptKind::RmsProp, lr};
    c.rho = rho;
    c.eps = eps;
    return c;
}
inline OptConfig adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999) {
    OptConfig c{OptKind::Adam, lr};
    c.beta1 = beta1;
    c.beta2 = beta2;
    return c;
}

// Per-parameter accumulators; shapes mirror the Params they update.
struct OptState {
    OptConfig cfg;
    Params acc1; // rmsprop mean-square / adam first moment
    Params acc2; // adam second moment
    long t = 0;

    OptState() = default;
    OptState(OptConfig cfg, const Params& shape);
};

// Applies one update in place. grads are not modified.
void optimizer_step(OptState& opt, Params& params, const Grads& grads);

} // namespace forager::neural
