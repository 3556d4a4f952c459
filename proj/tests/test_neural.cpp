#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "forager/neural/io.hpp"
#include "forager/neural/net.hpp"
#include "forager/neural/optimizer.hpp"
#include "support/oracles.hpp"

using namespace forager;
using neural::Activation;
using neural::Vec;

namespace {

// Scalar loss 0.5*||y - target||^2 with its output gradient.
double half_sq_loss(const Vec& y, const Vec& target) {
    double l = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) l += 0.5 * (y[i] - target[i]) * (y[i] - target[i]);
    return l;
}

Vec half_sq_grad(const Vec& y, const Vec& target) {
    Vec g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = y[i] - target[i];
    return g;
}

} // namespace

TEST_CASE("forward: identity layer with identity weights reproduces input") {
    Rng rng(1);
    neural::Network net(neural::make_mlp(2, {}, 2), rng);
    auto& l = net.params().layers[0];
    l.w = {1.0, 0.0, 0.0, 1.0};
    l.b = {0.0, 0.0};
    const Vec out = net.output({3.5, -2.0});
    CHECK(out[0] == doctest::Approx(3.5));
    CHECK(out[1] == doctest::Approx(-2.0));
}

TEST_CASE("forward: rectifier clamps negatives") {
    Rng rng(1);
    neural::Network net(
        neural::NetSpec{{2, 2}, {Activation::Rectifier}, 1.0}, rng);
    auto& l = net.params().layers[0];
    l.w = {1.0, 0.0, 0.0, 1.0};
    l.b = {0.0, 0.0};
    const Vec out = net.output({-1.0, 2.0});
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 2.0);
}

TEST_CASE("forward: softmax head on equal logits is uniform") {
    Rng rng(1);
    neural::Network net(neural::make_mlp(2, {}, 2, Activation::SoftmaxHead), rng);
    auto& l = net.params().layers[0];
    l.w = {0.0, 0.0, 0.0, 0.0};
    l.b = {0.0, 0.0};
    const Vec out = net.output({7.0, -3.0});
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax outputs: positive on realistic logits, finite even at |z| = 1e3") {
    const Vec p = neural::softmax({30.0, -30.0, 0.0});
    double sum = 0.0;
    for (double v : p) {
        CHECK(v > 0.0);
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);

    // Max-subtraction keeps extreme inputs finite and normalized.
    const Vec extreme = neural::softmax({1000.0, -1000.0, 0.0});
    double esum = 0.0;
    for (double v : extreme) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        esum += v;
    }
    CHECK(std::abs(esum - 1.0) < 1e-9);
}

TEST_CASE("backward: analytic gradient of (w*x - t)^2 at w=1, x=2, t=0 is 8") {
    Rng rng(1);
    neural::Network net(neural::make_mlp(1, {}, 1), rng);
    net.params().layers[0].w = {1.0};
    net.params().layers[0].b = {0.0};
    const neural::ForwardCache cache = net.forward({2.0});
    // L = (y - 0)^2, dL/dy = 2y = 4; dL/dw = 4 * x = 8.
    neural::Grads grads = net.zero_grads();
    net.backward(cache, {2.0 * cache.output()[0]}, grads);
    CHECK(grads.layers[0].w[0] == doctest::Approx(8.0));
}

TEST_CASE("backward: zero output grad gives zero grads") {
    Rng rng(3);
    neural::Network net(neural::make_mlp(4, {5}, 3), rng);
    neural::Grads grads = net.zero_grads();
    net.backward(net.forward({0.1, -0.2, 0.3, 0.4}), {0.0, 0.0, 0.0}, grads);
    for (const auto& l : grads.layers) {
        for (double w : l.w) CHECK(w == 0.0);
        for (double b : l.b) CHECK(b == 0.0);
    }
}

TEST_CASE("backward matches central finite differences on random nets") {
    Rng rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        const int in = 2 + static_cast<int>(rng.uniform_int(5));
        const int hid = 2 + static_cast<int>(rng.uniform_int(6));
        const int out = 1 + static_cast<int>(rng.uniform_int(4));
        const Activation head = trial % 3 == 0 ? Activation::SoftmaxHead : Activation::Identity;
        neural::Network net(neural::make_mlp(in, {hid}, out, head), rng);

        Vec input(in), target(out);
        for (double& v : input) v = rng.uniform(-1.0, 1.0);
        for (double& v : target) v = rng.uniform(-1.0, 1.0);

        const auto loss = [&] { return half_sq_loss(net.output(input), target); };
        neural::Grads grads = net.zero_grads();
        const neural::ForwardCache cache = net.forward(input);
        net.backward(cache, half_sq_grad(cache.output(), target), grads);

        const auto report =
            oracles::fd_check(oracles::flat_view(net.params()), oracles::flat_copy(grads), loss);
        CHECK(report.max_rel_err < 1e-4);
    }
}

TEST_CASE("spec validation rejects bad layouts") {
    CHECK_THROWS(neural::NetSpec{{4}, {}, 1.0}.validate());
    CHECK_THROWS(
        neural::NetSpec{{4, 3, 2}, {Activation::SoftmaxHead, Activation::Identity}, 1.0}.validate());
    CHECK_THROWS_AS(
        [] {
            Rng rng(1);
            neural::Network net(neural::make_mlp(3, {}, 2), rng);
            net.output({1.0});
        }(),
        std::invalid_argument);
}

TEST_CASE("optimizers: zero grads leave params unchanged") {
    Rng rng(5);
    for (auto cfg : {neural::sgd(0.1), neural::rmsprop(0.01), neural::adam(1e-3)}) {
        neural::Network net(neural::make_mlp(3, {4}, 2), rng);
        const neural::Params before = net.params();
        neural::OptState opt(cfg, net.params());
        neural::optimizer_step(opt, net.params(), net.zero_grads());
        for (std::size_t li = 0; li < before.layers.size(); ++li)
            for (std::size_t i = 0; i < before.layers[li].w.size(); ++i)
                CHECK(net.params().layers[li].w[i] == before.layers[li].w[i]);
    }
}

TEST_CASE("sgd: param -= lr * grad") {
    Rng rng(5);
    neural::Network net(neural::make_mlp(1, {}, 1), rng);
    net.params().layers[0].w = {2.0};
    neural::Grads g = net.zero_grads();
    g.layers[0].w[0] = 3.0;
    neural::OptState opt(neural::sgd(0.1), net.params());
    neural::optimizer_step(opt, net.params(), g);
    CHECK(net.params().layers[0].w[0] == doctest::Approx(2.0 - 0.3));
}

TEST_CASE("rmsprop first step equals -lr*g/sqrt((1-rho)g^2 + eps)") {
    const double lr = 0.01, rho = 0.99, eps = 1e-6, g = 2.0, w0 = 0.5;
    Rng rng(5);
    neural::Network net(neural::make_mlp(1, {}, 1), rng);
    net.params().layers[0].w = {w0};
    neural::Grads grads = net.zero_grads();
    grads.layers[0].w[0] = g;
    neural::OptState opt(neural::rmsprop(lr, rho, eps), net.params());
    neural::optimizer_step(opt, net.params(), grads);
    const double expected = w0 - lr * g / std::sqrt((1.0 - rho) * g * g + eps);
    CHECK(net.params().layers[0].w[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adam first step is a bias-corrected signed move") {
    const double lr = 1e-3, g = 0.37;
    Rng rng(5);
    neural::Network net(neural::make_mlp(1, {}, 1), rng);
    net.params().layers[0].w = {1.0};
    neural::Grads grads = net.zero_grads();
    grads.layers[0].w[0] = g;
    neural::OptState opt(neural::adam(lr), net.params());
    neural::optimizer_step(opt, net.params(), grads);
    // First step: mhat = g, vhat = g^2, delta = -lr*g/(|g| + eps).
    const double expected = 1.0 - lr * g / (std::abs(g) + 1e-8);
    CHECK(net.params().layers[0].w[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(opt.t == 1);
}

TEST_CASE("initialization is deterministic for a fixed seed") {
    Rng r1(77), r2(77);
    neural::Network a(neural::make_mlp(6, {5, 4}, 3), r1);
    neural::Network b(neural::make_mlp(6, {5, 4}, 3), r2);
    for (std::size_t li = 0; li < a.params().layers.size(); ++li)
        for (std::size_t i = 0; i < a.params().layers[li].w.size(); ++i)
            CHECK(a.params().layers[li].w[i] == b.params().layers[li].w[i]);
}

TEST_CASE("params save/load round-trips bit-exactly and rejects bad files") {
    Rng rng(11);
    neural::Network net(neural::make_mlp(4, {3}, 2), rng);
    const std::string path = (std::filesystem::temp_directory_path() / "fg_params.bin").string();
    neural::save_params(net.params(), path);
    const neural::Params loaded = neural::load_params(path);
    REQUIRE(loaded.layers.size() == net.params().layers.size());
    for (std::size_t li = 0; li < loaded.layers.size(); ++li) {
        for (std::size_t i = 0; i < loaded.layers[li].w.size(); ++i)
            CHECK(loaded.layers[li].w[i] == net.params().layers[li].w[i]);
        for (std::size_t i = 0; i < loaded.layers[li].b.size(); ++i)
            CHECK(loaded.layers[li].b[i] == net.params().layers[li].b[i]);
    }

    const std::string bad = (std::filesystem::temp_directory_path() / "fg_bad.bin").string();
    {
        std::FILE* f = std::fopen(bad.c_str(), "wb");
        std::fputs("NOTPARAM junk", f);
        std::fclose(f);
    }
    CHECK_THROWS(neural::load_params(bad));
    CHECK_THROWS(neural::load_params("/nonexistent/params.bin"));
    std::filesystem::remove(path);
    std::filesystem::remove(bad);
}
