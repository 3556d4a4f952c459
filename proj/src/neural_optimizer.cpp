#include "forager/neural/optimizer.hpp"

#include <cmath>

namespace forager::neural {

OptState::OptState(OptConfig c, const Params& shape) : cfg(c) {
    if (cfg.kind != OptKind::Sgd) {
        acc1 = shape;
        acc1.fill(0.0);
    }
    if (cfg.kind == OptKind::Adam) {
        acc2 = shape;
        acc2.fill(0.0);
    }
}

namespace {

void step_buffer(OptState& opt, double* p, const double* g, double* m, double* v, std::size_t n) {
    const OptConfig& c = opt.cfg;
    switch (c.kind) {
        case OptKind::Sgd:
            for (std::size_t i = 0; i < n; ++i) p[i] -= c.lr * g[i];
            break;
        case OptKind::RmsProp:
            for (std::size_t i = 0; i < n; ++i) {
                m[i] = c.rho * m[i] + (1.0 - c.rho) * g[i] * g[i];
                p[i] -= c.lr * g[i] / std::sqrt(m[i] + c.eps);
            }
            break;
        case OptKind::Adam: {
            const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(opt.t));
            const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(opt.t));
            for (std::size_t i = 0; i < n; ++i) {
                m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
                v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.adam_eps);
            }
            break;
        }
    }
}

} // namespace

void optimizer_step(OptState& opt, Params& params, const Grads& grads) {
    if (grads.layers.size() != params.layers.size())
        throw std::invalid_argument("optimizer_step: shape mismatch");
    if (opt.cfg.kind == OptKind::Adam) ++opt.t;
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        Layer& pl = params.layers[li];
        const Layer& gl = grads.layers[li];
        double* m_w = opt.cfg.kind == OptKind::Sgd ? nullptr : opt.acc1.layers[li].w.data();
        double* m_b = opt.cfg.kind == OptKind::Sgd ? nullptr : opt.acc1.layers[li].b.data();
        double* v_w = opt.cfg.kind == OptKind::Adam ? opt.acc2.layers[li].w.data() : nullptr;
        double* v_b = opt.cfg.kind == OptKind::Adam ? opt.acc2.layers[li].b.data() : nullptr;
        step_buffer(opt, pl.w.data(), gl.w.data(), m_w, v_w, pl.w.size());
        step_buffer(opt, pl.b.data(), gl.b.data(), m_b, v_b, pl.b.size());
    }
}

} // namespace forager::neural
