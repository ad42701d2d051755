#include <cmath>

#include "doctest.h"

#include "icae/errors.hpp"
#include "icae/nn.hpp"
#include "test_support.hpp"

using namespace icae;

namespace {

Network single_layer(LayerKind kind, int width, PowerMode mode = PowerMode::batch_average) {
    Network net;
    Layer layer;
    layer.spec = {kind, width, width, mode};
    net.layers.push_back(layer);
    return net;
}

} // namespace

TEST_SUITE_BEGIN("nn");

TEST_CASE("dense identity passes input through") {
    Network net;
    Layer dense;
    dense.spec = {LayerKind::dense, 3, 3};
    dense.params.weights = Tensor2(3, 3, 0.0);
    for (int i = 0; i < 3; ++i) dense.params.weights.at(i, i) = 1.0;
    dense.params.bias.assign(3, 0.0);
    net.layers.push_back(dense);

    RngStream rng(5, 0);
    const Tensor2 x = testing::random_tensor(4, 3, rng);
    const Tensor2 y = infer(net, x);
    CHECK(y == x);
}

TEST_CASE("relu clamps negatives") {
    Network net = single_layer(LayerKind::relu, 3);
    Tensor2 x(1, 3);
    x.at(0, 0) = -1.0;
    x.at(0, 1) = 0.0;
    x.at(0, 2) = 2.0;
    const Tensor2 y = infer(net, x);
    CHECK(y.at(0, 0) == 0.0);
    CHECK(y.at(0, 1) == 0.0);
    CHECK(y.at(0, 2) == 2.0);
}

TEST_CASE("softmax of zero logits is uniform and rows sum to one") {
    Network net = single_layer(LayerKind::softmax, 16);
    const Tensor2 y = infer(net, Tensor2(2, 16, 0.0));
    for (int c = 0; c < 16; ++c) CHECK(y.at(0, c) == doctest::Approx(1.0 / 16).epsilon(1e-12));

    RngStream rng(7, 0);
    Tensor2 logits = testing::random_tensor(8, 16, rng, -30.0, 30.0);
    const Tensor2 p = infer(net, logits);
    for (int r = 0; r < p.rows(); ++r) {
        double sum = 0.0;
        for (double v : p.row(r)) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }

    // shift invariance: adding a constant per row must not change the output
    Tensor2 shifted = logits;
    for (int r = 0; r < shifted.rows(); ++r) {
        for (double& v : shifted.row(r)) v += 1000.0;
    }
    const Tensor2 p2 = infer(net, shifted);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.data()[i] == doctest::Approx(p2.data()[i]).epsilon(1e-12));
}

TEST_CASE("batch power norm enforces the batch statistic exactly") {
    Network net = single_layer(LayerKind::batch_power_norm, 8);
    RngStream rng(11, 0);
    Tensor2 x = testing::random_tensor(64, 8, rng, -2.0, 2.0);
    ForwardCache cache;
    const Tensor2 y = forward_train(net, x, cache);

    double mean_sq_norm = 0.0;
    for (int r = 0; r < y.rows(); ++r) {
        double norm = 0.0;
        for (double v : y.row(r)) norm += v * v;
        mean_sq_norm += norm;
    }
    mean_sq_norm /= y.rows();
    CHECK(mean_sq_norm == doctest::Approx(8.0).epsilon(1e-9));

    SUBCASE("train mode requires a batch") {
        Tensor2 single(1, 8, 0.5);
        ForwardCache c2;
        CHECK_THROWS_AS(forward_train(net, single, c2), UsageError);
    }
    SUBCASE("running scale converges and inference uses it") {
        for (int i = 0; i < 2000; ++i) {
            ForwardCache c2;
            forward_train(net, x, c2);
        }
        const Tensor2 y_infer = infer(net, x);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(y_infer.data()[i] == doctest::Approx(y.data()[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("per-codeword norm fixes every row") {
    Network net = single_layer(LayerKind::batch_power_norm, 8, PowerMode::per_codeword);
    RngStream rng(13, 0);
    Tensor2 x = testing::random_tensor(5, 8, rng, -3.0, 3.0);
    const Tensor2 y = infer(net, x);
    for (int r = 0; r < y.rows(); ++r) {
        double norm = 0.0;
        for (double v : y.row(r)) norm += v * v;
        CHECK(norm == doctest::Approx(8.0).epsilon(1e-12));
    }
}

TEST_CASE("infer is pure") {
    RngStream rng(3, 1);
    std::vector<LayerSpec> specs = {
        {LayerKind::dense, 16, 32},
        {LayerKind::relu, 32, 32},
        {LayerKind::dense, 32, 8},
        {LayerKind::linear, 8, 8},
        {LayerKind::batch_power_norm, 8, 8},
    };
    Network net = make_network(specs, rng);
    const Tensor2 x = testing::random_tensor(6, 16, rng);
    const Tensor2 a = infer(net, x);
    const Tensor2 b = infer(net, x);
    CHECK(a == b);
}

TEST_CASE("forward rejects shape mismatch and non-finite activations") {
    RngStream rng(3, 1);
    std::vector<LayerSpec> specs = {{LayerKind::dense, 4, 4}};
    Network net = make_network(specs, rng);
    CHECK_THROWS_AS(infer(net, Tensor2(2, 5, 0.0)), ConfigError);

    net.layers[0].params.weights.at(0, 0) = std::numeric_limits<double>::infinity();
    Tensor2 x(2, 4, 1.0);
    CHECK_THROWS_AS(infer(net, x), NumericalError);
}

TEST_CASE("backward of zero gradient is zero") {
    RngStream rng(19, 0);
    std::vector<LayerSpec> specs = {
        {LayerKind::dense, 6, 5},
        {LayerKind::relu, 5, 5},
        {LayerKind::dense, 5, 4},
    };
    Network net = make_network(specs, rng);
    const Tensor2 x = testing::random_tensor(3, 6, rng);
    ForwardCache cache;
    forward_train(net, x, cache);
    GradientSet grads = make_zero_gradients(net);
    const Tensor2 input_grad = backward(net, cache, Tensor2(3, 4, 0.0), grads);
    for (double v : input_grad.data()) CHECK(v == 0.0);
    for (const auto& layer : grads.layers) {
        for (double v : layer.dweights.data()) CHECK(v == 0.0);
        for (double v : layer.dbias) CHECK(v == 0.0);
    }
}

TEST_CASE("scalar dense chain rule") {
    Network net;
    Layer dense;
    dense.spec = {LayerKind::dense, 1, 1};
    dense.params.weights = Tensor2(1, 1, 2.5);
    dense.params.bias.assign(1, 0.0);
    net.layers.push_back(dense);

    Tensor2 x(1, 1, 3.0);
    ForwardCache cache;
    forward_train(net, x, cache);
    GradientSet grads = make_zero_gradients(net);
    Tensor2 g(1, 1, 0.75);
    const Tensor2 input_grad = backward(net, cache, g, grads);
    CHECK(grads.layers[0].dweights.at(0, 0) == doctest::Approx(0.75 * 3.0));
    CHECK(grads.layers[0].dbias[0] == doctest::Approx(0.75));
    CHECK(input_grad.at(0, 0) == doctest::Approx(0.75 * 2.5));
}

TEST_CASE("cross entropy against hand values") {
    SUBCASE("uniform posterior") {
        const Tensor2 p(3, 16, 1.0 / 16);
        const std::vector<int> targets = {0, 5, 15};
        const auto ce = cross_entropy_loss_and_grad(p, targets);
        CHECK(ce.loss == doctest::Approx(2.772588722239781).epsilon(1e-12));
        CHECK(ce.saturated_rows == 0);
    }
    SUBCASE("one-hot correct posterior has zero loss and zero gradient") {
        Tensor2 p(2, 4, 0.0);
        p.at(0, 1) = 1.0;
        p.at(1, 3) = 1.0;
        const std::vector<int> targets = {1, 3};
        const auto ce = cross_entropy_loss_and_grad(p, targets);
        CHECK(ce.loss == 0.0);
        for (double v : ce.logit_grad.data()) CHECK(v == 0.0);
    }
    SUBCASE("width-2 hand calculation") {
        Tensor2 p(1, 2);
        p.at(0, 0) = 0.75;
        p.at(0, 1) = 0.25;
        const std::vector<int> targets = {0};
        const auto ce = cross_entropy_loss_and_grad(p, targets);
        CHECK(ce.loss == doctest::Approx(0.2876820724517809).epsilon(1e-12));
        CHECK(ce.logit_grad.at(0, 0) == doctest::Approx(-0.25));
        CHECK(ce.logit_grad.at(0, 1) == doctest::Approx(0.25));
    }
    SUBCASE("zero probability at target clamps instead of blowing up") {
        Tensor2 p(1, 2);
        p.at(0, 0) = 0.0;
        p.at(0, 1) = 1.0;
        const std::vector<int> targets = {0};
        const auto ce = cross_entropy_loss_and_grad(p, targets);
        CHECK(std::isfinite(ce.loss));
        CHECK(ce.saturated_rows == 1);
        CHECK(ce.loss == doctest::Approx(-std::log(1e-12)));
    }
    SUBCASE("rows must lie on the simplex") {
        Tensor2 p(1, 2, 0.9);
        const std::vector<int> targets = {0};
        CHECK_THROWS_AS(cross_entropy_loss_and_grad(p, targets), UsageError);
    }
}

TEST_CASE("optimizer steps") {
    Network net;
    Layer dense;
    dense.spec = {LayerKind::dense, 1, 1};
    dense.params.weights = Tensor2(1, 1, 1.0);
    dense.params.bias.assign(1, 0.0);
    net.layers.push_back(dense);

    GradientSet grads = make_zero_gradients(net);

    SUBCASE("sgd") {
        OptimizerConfig cfg;
        cfg.kind = OptKind::sgd;
        cfg.learning_rate = 0.1;
        OptimizerState state = make_optimizer(net, cfg);
        grads.layers[0].dweights.at(0, 0) = 0.5;
        optimizer_step(net, grads, state);
        CHECK(net.layers[0].params.weights.at(0, 0) == doctest::Approx(0.95).epsilon(1e-15));
    }
    SUBCASE("zero gradient leaves parameters unchanged") {
        for (OptKind kind : {OptKind::sgd, OptKind::adam}) {
            net.layers[0].params.weights.at(0, 0) = 1.0;
            OptimizerConfig cfg;
            cfg.kind = kind;
            OptimizerState state = make_optimizer(net, cfg);
            optimizer_step(net, grads, state);
            CHECK(net.layers[0].params.weights.at(0, 0) == 1.0);
        }
    }
    SUBCASE("adam first step with unit gradient") {
        OptimizerConfig cfg; // adam defaults
        OptimizerState state = make_optimizer(net, cfg);
        grads.layers[0].dweights.at(0, 0) = 1.0;
        optimizer_step(net, grads, state);
        // single-step hand calculation: lr * mhat / (sqrt(vhat) + eps)
        CHECK(net.layers[0].params.weights.at(0, 0) == doctest::Approx(1.0 - 0.000999999990000001).epsilon(1e-12));
        CHECK(state.step_count == 1);
    }
    SUBCASE("non-finite gradient refuses and leaves parameters untouched") {
        OptimizerConfig cfg;
        OptimizerState state = make_optimizer(net, cfg);
        grads.layers[0].dweights.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(optimizer_step(net, grads, state), NumericalError);
        CHECK(net.layers[0].params.weights.at(0, 0) == 1.0);
    }
}

TEST_CASE("finite differences: exact for linear maps") {
    RngStream rng(23, 0);
    std::vector<LayerSpec> specs = {
        {LayerKind::dense, 5, 4},
        {LayerKind::linear, 4, 4},
        {LayerKind::dense, 4, 3},
    };
    Network net = make_network(specs, rng);
    const Tensor2 x = testing::random_tensor(4, 5, rng);
    const std::vector<int> targets = {0, 2, 1, 2};
    CHECK(finite_difference_check(net, x, targets, 1e-5) < 1e-9);
}

TEST_CASE("finite differences: full encoder and decoder shapes") {
    RngStream rng(29, 0);
    std::vector<LayerSpec> encoder = {
        {LayerKind::dense, 16, 32},
        {LayerKind::relu, 32, 32},
        {LayerKind::dense, 32, 8},
        {LayerKind::linear, 8, 8},
        {LayerKind::batch_power_norm, 8, 8},
    };
    std::vector<LayerSpec> decoder = {
        {LayerKind::dense, 8, 32},
        {LayerKind::relu, 32, 32},
        {LayerKind::dense, 32, 32},
        {LayerKind::linear, 32, 32},
        {LayerKind::dense, 32, 16},
        {LayerKind::softmax, 16, 16},
    };
    for (int trial = 0; trial < 3; ++trial) {
        Network enc = make_network(encoder, rng);
        Tensor2 x(8, 16, 0.0);
        std::vector<int> messages(8), symbol_slots(8);
        for (int r = 0; r < 8; ++r) {
            messages[r] = rng.uniform_index(16);
            x.at(r, messages[r]) = 1.0;
            symbol_slots[r] = rng.uniform_index(8); // encoder output is width n
        }
        CHECK(finite_difference_check(enc, x, symbol_slots, 1e-5) < 1e-4);

        Network dec = make_network(decoder, rng);
        // jitter away from relu kinks
        Tensor2 y = testing::random_tensor(8, 8, rng, -1.5, 1.5);
        CHECK(finite_difference_check(dec, y, messages, 1e-5) < 1e-4);
    }
}

TEST_CASE("per-codeword norm gradient matches finite differences") {
    RngStream rng(37, 0);
    std::vector<LayerSpec> specs = {
        {LayerKind::dense, 6, 8},
        {LayerKind::batch_power_norm, 8, 8, PowerMode::per_codeword},
    };
    Network net = make_network(specs, rng);
    const Tensor2 x = testing::random_tensor(5, 6, rng, 0.2, 1.0);
    const std::vector<int> targets = {0, 3, 7, 1, 4};
    CHECK(finite_difference_check(net, x, targets, 1e-5) < 1e-4);
}

TEST_SUITE_END();
