#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icae/rng.hpp"
#include "icae/tensor.hpp"

namespace icae {

enum class LayerKind { dense, relu, linear, batch_power_norm, softmax };
enum class PowerMode { batch_average, per_codeword };
enum class Mode { train, infer };

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    int in_width = 0;
    int out_width = 0;
    // batch_power_norm only
    PowerMode norm_mode = PowerMode::batch_average;
};

struct LayerParams {
    Tensor2 weights;          // dense: in_width x out_width
    std::vector<double> bias; // dense: out_width
    // batch_power_norm, batch_average mode: running mean power per dimension.
    // Inference always normalizes by this value, so inference is
    // deterministic. The first train-mode batch seeds it; later batches fold
    // in via EMA with norm_momentum.
    double norm_running_scale = 1.0;
    double norm_momentum = 0.99;
    bool norm_seeded = false;
};

struct Layer {
    LayerSpec spec;
    LayerParams params;
};

struct Network {
    std::vector<Layer> layers;

    int input_width() const { return layers.empty() ? 0 : layers.front().spec.in_width; }
    int output_width() const { return layers.empty() ? 0 : layers.back().spec.out_width; }
    bool all_finite() const;
};

// Per-layer gradients mirroring the trainable parameters (dense weights and
// bias; the other kinds carry empty slots).
struct LayerGrads {
    Tensor2 dweights;
    std::vector<double> dbias;
};

struct GradientSet {
    std::vector<LayerGrads> layers;
    bool all_finite() const;
    void scale_and_add(const GradientSet& other, double factor); // this += factor * other
};

// Intermediates captured by a train-mode forward pass. inputs[i] is the
// activation entering layer i; norm_batch_power[i] is the per-dimension mean
// power seen by a batch_average norm layer.
struct ForwardCache {
    std::vector<Tensor2> inputs;
    Tensor2 output;
    std::vector<double> norm_batch_power;
};

// Builds a network from layer specs. Dense weights are fan-balanced uniform
// (+-sqrt(6/(fan_in+fan_out))), biases zero.
Network make_network(std::span<const LayerSpec> specs, RngStream& rng);

// Deterministic inference pass; batch_power_norm uses the running scale.
Tensor2 infer(const Network& net, const Tensor2& input);

// Train-mode pass: batch_power_norm normalizes by the batch statistic and,
// unless update_norm_stats is false, folds it into the running scale.
Tensor2 forward_train(Network& net, const Tensor2& input, ForwardCache& cache, bool update_norm_stats = true);

// Backpropagates output_grad through the whole network; fills grads and
// returns the gradient at the network input.
Tensor2 backward(const Network& net, const ForwardCache& cache, const Tensor2& output_grad, GradientSet& grads);

// Same, but starting below the trailing softmax with a gradient w.r.t. the
// pre-softmax logits (pairs with cross_entropy_loss_and_grad).
Tensor2 backward_from_logits(const Network& net, const ForwardCache& cache, const Tensor2& logit_grad, GradientSet& grads);

GradientSet make_zero_gradients(const Network& net);

struct CrossEntropyResult {
    double loss = 0.0;
    Tensor2 logit_grad;
    // rows whose target probability was clamped to the 1e-12 floor
    int saturated_rows = 0;
};

// Mean negative log-likelihood of the targets under a softmax posterior,
// fused with the softmax so the returned gradient is w.r.t. the logits:
// (posterior - one_hot) / batch.
CrossEntropyResult cross_entropy_loss_and_grad(const Tensor2& posterior, std::span<const int> targets);

enum class OptKind { sgd, adam };

struct OptimizerConfig {
    OptKind kind = OptKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    void validate() const;
};

struct OptimizerState {
    OptimizerConfig config;
    GradientSet first_moment;
    GradientSet second_moment;
    std::uint64_t step_count = 0;
};

OptimizerState make_optimizer(const Network& net, const OptimizerConfig& config);

// Descent step. Refuses non-finite gradients before touching any parameter.
void optimizer_step(Network& net, const GradientSet& grads, OptimizerState& state);

// Central finite differences over every trainable parameter against the
// analytic backward pass; returns the maximum relative error. Loss is
// cross-entropy when the network ends in softmax, otherwise the mean of the
// target-indexed outputs. Norm running scales stay frozen throughout.
double finite_difference_check(Network& net, const Tensor2& input, std::span<const int> targets, double perturbation);

} // namespace icae
