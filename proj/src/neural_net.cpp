#include "forager/neural/net.hpp"

#include <algorithm>
#include <cmath>

namespace forager::neural {

void NetSpec::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("NetSpec: need at least one weight layer");
    if (activations.size() != layer_sizes.size() - 1)
        throw std::invalid_argument("NetSpec: one activation per weight layer required");
    for (int s : layer_sizes)
        if (s <= 0) throw std::invalid_argument("NetSpec: layer sizes must be positive");
    for (std::size_t i = 0; i + 1 < activations.size(); ++i)
        if (activations[i] == Activation::SoftmaxHead)
            throw std::invalid_argument("NetSpec: softmax only allowed as final activation");
}

NetSpec make_mlp(int input, const std::vector<int>& hidden, int output, Activation head) {
    NetSpec spec;
    spec.layer_sizes.push_back(input);
    for (int h : hidden) {
        spec.layer_sizes.push_back(h);
        spec.activations.push_back(Activation::Rectifier);
    }
    spec.layer_sizes.push_back(output);
    spec.activations.push_back(head);
    spec.validate();
    return spec;
}

std::size_t Params::scalar_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.w.size() + l.b.size();
    return n;
}

void Params::fill(double v) {
    for (Layer& l : layers) {
        std::fill(l.w.begin(), l.w.end(), v);
        std::fill(l.b.begin(), l.b.end(), v);
    }
}

Network::Network(NetSpec spec, Rng& rng) : spec_(std::move(spec)) {
    spec_.validate();
    init(rng);
}

void Network::init(Rng& rng) {
    params_.layers.clear();
    for (int i = 0; i < spec_.n_layers(); ++i) {
        Layer l;
        l.in = spec_.layer_sizes[i];
        l.out = spec_.layer_sizes[i + 1];
        l.w.resize(static_cast<std::size_t>(l.in) * l.out);
        l.b.assign(l.out, 0.0);
        // Uniform fan-in scaling.
        const double bound = spec_.init_scale / std::sqrt(static_cast<double>(l.in));
        for (double& w : l.w) w = rng.uniform(-bound, bound);
        params_.layers.push_back(std::move(l));
    }
}

Vec softmax(const Vec& z) {
    Vec p(z.size());
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

ForwardCache Network::forward(const Vec& input) const {
    if (static_cast<int>(input.size()) != spec_.input_size())
        throw std::invalid_argument("Network::forward: input size " + std::to_string(input.size()) +
                                    " != " + std::to_string(spec_.input_size()));
    ForwardCache cache;
    cache.input = input;
    cache.pre.resize(params_.layers.size());
    cache.post.resize(params_.layers.size());

    const Vec* x = &cache.input;
    for (std::size_t li = 0; li < params_.layers.size(); ++li) {
        const Layer& l = params_.layers[li];
        Vec& z = cache.pre[li];
        z.resize(l.out);
        for (int r = 0; r < l.out; ++r) {
            const double* wr = &l.w[static_cast<std::size_t>(r) * l.in];
            double acc = l.b[r];
            for (int c = 0; c < l.in; ++c) acc += wr[c] * (*x)[c];
            z[r] = acc;
        }
        Vec& a = cache.post[li];
        switch (spec_.activations[li]) {
            case Activation::Rectifier:
                a.resize(l.out);
                for (int r = 0; r < l.out; ++r) a[r] = z[r] > 0.0 ? z[r] : 0.0;
                break;
            case Activation::Identity:
                a = z;
                break;
            case Activation::SoftmaxHead:
                a = softmax(z);
                break;
        }
        x = &a;
    }
    return cache;
}

Vec Network::backward(const ForwardCache& cache, const Vec& output_grad, Grads& grads) const {
    if (grads.layers.size() != params_.layers.size())
        throw std::invalid_argument("Network::backward: grads shape mismatch");
    if (output_grad.size() != cache.output().size())
        throw std::invalid_argument("Network::backward: output_grad size mismatch");

    Vec g = output_grad; // dL/d(post-activation of current layer)
    for (int li = static_cast<int>(params_.layers.size()) - 1; li >= 0; --li) {
        const Layer& l = params_.layers[li];
        Layer& gl = grads.layers[li];

        // dL/d(pre-activation)
        Vec dz(l.out);
        switch (spec_.activations[li]) {
            case Activation::Rectifier:
                for (int r = 0; r < l.out; ++r) dz[r] = cache.pre[li][r] > 0.0 ? g[r] : 0.0;
                break;
            case Activation::Identity:
                dz = g;
                break;
            case Activation::SoftmaxHead: {
                const Vec& p = cache.post[li];
                double dot = 0.0;
                for (int r = 0; r < l.out; ++r) dot += g[r] * p[r];
                for (int r = 0; r < l.out; ++r) dz[r] = p[r] * (g[r] - dot);
                break;
            }
        }

        const Vec& x = (li == 0) ? cache.input : cache.post[li - 1];
        for (int r = 0; r < l.out; ++r) {
            double* gw = &gl.w[static_cast<std::size_t>(r) * l.in];
            const double d = dz[r];
            for (int c = 0; c < l.in; ++c) gw[c] += d * x[c];
            gl.b[r] += d;
        }

        Vec dx(l.in, 0.0);
        for (int r = 0; r < l.out; ++r) {
            const double* wr = &l.w[static_cast<std::size_t>(r) * l.in];
            const double d = dz[r];
            for (int c = 0; c < l.in; ++c) dx[c] += wr[c] * d;
        }
        g = std::move(dx);
    }
    return g;
}

Grads Network::zero_grads() const {
    Grads g = params_;
    g.fill(0.0);
    return g;
}

void axpy(double a, const Params& x, Params& y) {
    for (std::size_t li = 0; li < y.layers.size(); ++li) {
        for (std::size_t i = 0; i < y.layers[li].w.size(); ++i) y.layers[li].w[i] += a * x.layers[li].w[i];
        for (std::size_t i = 0; i < y.layers[li].b.size(); ++i) y.layers[li].b[i] += a * x.layers[li].b[i];
    }
}

void scale(Params& x, double a) {
    for (Layer& l : x.layers) {
        for (double& v : l.w) v *= a;
        for (double& v : l.b) v *= a;
    }
}

} // namespace forager::neural
