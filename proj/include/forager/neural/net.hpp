#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "forager/rng.hpp"

namespace forager::neural {

using Vec = std::vector<double>;

enum class Activation { Rectifier, Identity, SoftmaxHead };

// layer_sizes = [input, hidden..., output]; activations has one entry per
// weight layer. SoftmaxHead is only legal as the final activation.
struct NetSpec {
    std::vector<int> layer_sizes;
    std::vector<Activation> activations;
    double init_scale = 1.0;

    int n_layers() const { return static_cast<int>(activations.size()); }
    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    void validate() const;
};

NetSpec make_mlp(int input, const std::vector<int>& hidden, int output,
                 Activation head = Activation::Identity);

struct Layer {
    int in = 0;
    int out = 0;
    Vec w; // row-major [out x in]
    Vec b; // [out]
};

struct Params {
    std::vector<Layer> layers;

    std::size_t scalar_count() const;
    void fill(double v);
};

using Grads = Params; // same shapes, accumulated in place

// Pre- and post-activation values of every layer, kept for backward.
struct ForwardCache {
    Vec input;
    std::vector<Vec> pre;
    std::vector<Vec> post;

    const Vec& output() const { return post.back(); }
};

class Network {
public:
    Network() = default;
    Network(NetSpec spec, Rng& rng);

    const NetSpec& spec() const { return spec_; }
    Params& params() { return params_; }
    const Params& params() const { return params_; }

    ForwardCache forward(const Vec& input) const;
    Vec output(const Vec& input) const { return forward(input).output(); }

    // Exact reverse-mode pass. output_grad is dL/d(post-activation output).
    // Accumulates parameter gradients into grads and returns dL/d(input).
    Vec backward(const ForwardCache& cache, const Vec& output_grad, Grads& grads) const;

    Grads zero_grads() const;
    void init(Rng& rng);

private:
    NetSpec spec_;
    Params params_;
};

// Numerically stable softmax: strictly positive, sums to 1.
Vec softmax(const Vec& z);

// Elementwise helpers used by the training code.
void axpy(double a, const Params& x, Params& y); // y += a*x
void scale(Params& x, double a);

} // namespace forager::neural
