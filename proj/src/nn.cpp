#include "icae/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icae/errors.hpp"

namespace icae {

namespace {

constexpr double kPosteriorFloor = 1e-12;
constexpr double kMinBatchPower = 1e-30;

void validate_spec(const LayerSpec& spec, int layer_index) {
    const std::string where = "layer " + std::to_string(layer_index);
    if (spec.in_width < 1 || spec.out_width < 1) {
        throw ConfigError(where + ": widths must be >= 1");
    }
    if (spec.kind != LayerKind::dense && spec.in_width != spec.out_width) {
        throw ConfigError(where + ": non-dense layers require out_width == in_width");
    }
}

void check_finite(const Tensor2& t, int layer_index) {
    if (!t.all_finite()) {
        throw NumericalError("non-finite activation leaving layer " + std::to_string(layer_index));
    }
}

double batch_mean_power(const Tensor2& x) {
    double sum = 0.0;
    for (double v : x.data()) sum += v * v;
    return sum / static_cast<double>(x.size());
}

// y = x / sqrt(power); the whole-batch scaling that enforces the average
// power constraint E[||z||^2] = n when power is the batch mean square.
Tensor2 scale_by_power(const Tensor2& x, double power) {
    if (power < kMinBatchPower) {
        throw NumericalError("batch_power_norm saw vanishing input power");
    }
    const double scale = 1.0 / std::sqrt(power);
    Tensor2 out = x;
    for (double& v : out.data()) v *= scale;
    return out;
}

Tensor2 per_codeword_normalize(const Tensor2& x, int width) {
    Tensor2 out = x;
    const double target = std::sqrt(static_cast<double>(width));
    for (int r = 0; r < x.rows(); ++r) {
        double norm_sq = 0.0;
        for (double v : x.row(r)) norm_sq += v * v;
        if (norm_sq < kMinBatchPower) {
            throw NumericalError("per_codeword normalization saw a zero-norm row " + std::to_string(r));
        }
        const double scale = target / std::sqrt(norm_sq);
        for (double& v : out.row(r)) v *= scale;
    }
    return out;
}

Tensor2 apply_layer(const Layer& layer, const Tensor2& x, Mode mode, bool update_norm_stats, double* batch_power_out, LayerParams* mutable_params) {
    switch (layer.spec.kind) {
    case LayerKind::dense: {
        Tensor2 out = matmul(x, layer.params.weights);
        for (int r = 0; r < out.rows(); ++r) {
            double* row = out.row(r).data();
            for (int c = 0; c < out.cols(); ++c) row[c] += layer.params.bias[c];
        }
        return out;
    }
    case LayerKind::relu: {
        Tensor2 out = x;
        for (double& v : out.data()) v = std::max(v, 0.0);
        return out;
    }
    case LayerKind::linear:
        return x;
    case LayerKind::batch_power_norm: {
        if (layer.spec.norm_mode == PowerMode::per_codeword) {
            return per_codeword_normalize(x, layer.spec.out_width);
        }
        if (mode == Mode::infer) {
            return scale_by_power(x, layer.params.norm_running_scale);
        }
        if (x.rows() < 2) {
            throw UsageError("batch_power_norm in train mode requires batch size >= 2");
        }
        const double power = batch_mean_power(x);
        if (batch_power_out != nullptr) *batch_power_out = power;
        if (update_norm_stats && mutable_params != nullptr) {
            if (!layer.params.norm_seeded) {
                mutable_params->norm_running_scale = power;
                mutable_params->norm_seeded = true;
            } else {
                const double m = layer.params.norm_momentum;
                mutable_params->norm_running_scale = m * layer.params.norm_running_scale + (1.0 - m) * power;
            }
        }
        return scale_by_power(x, power);
    }
    case LayerKind::softmax: {
        Tensor2 out = x;
        for (int r = 0; r < out.rows(); ++r) {
            auto row = out.row(r);
            const double row_max = *std::max_element(row.begin(), row.end());
            double sum = 0.0;
            for (double& v : row) {
                v = std::exp(v - row_max);
                sum += v;
            }
            for (double& v : row) v /= sum;
        }
        return out;
    }
    }
    throw ConfigError("unknown layer kind");
}

Tensor2 run_forward(Network& net, const Tensor2& input, Mode mode, ForwardCache* cache, bool update_norm_stats) {
    if (net.layers.empty()) throw ConfigError("network has no layers");
    if (input.cols() != net.input_width()) {
        throw ConfigError("input width " + std::to_string(input.cols()) + " does not match network input width " + std::to_string(net.input_width()));
    }
    if (cache != nullptr) {
        cache->inputs.clear();
        cache->norm_batch_power.assign(net.layers.size(), 0.0);
    }
    Tensor2 current = input;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& layer = net.layers[i];
        if (cache != nullptr) cache->inputs.push_back(current);
        double batch_power = 0.0;
        current = apply_layer(layer, current, mode, update_norm_stats, &batch_power, &layer.params);
        if (cache != nullptr && layer.spec.kind == LayerKind::batch_power_norm) {
            cache->norm_batch_power[i] = batch_power;
        }
        check_finite(current, static_cast<int>(i));
    }
    if (cache != nullptr) cache->output = current;
    return current;
}

// Backprop through layers [0, top). grad arrives at the input of layer `top`.
Tensor2 run_backward(const Network& net, const ForwardCache& cache, Tensor2 grad, std::size_t top, GradientSet& grads) {
    if (cache.inputs.size() != net.layers.size()) {
        throw UsageError("backward requires a cache produced by forward_train on the same network");
    }
    if (grads.layers.size() != net.layers.size()) grads = make_zero_gradients(net);
    for (std::size_t idx = top; idx-- > 0;) {
        const Layer& layer = net.layers[idx];
        const Tensor2& x = cache.inputs[idx];
        switch (layer.spec.kind) {
        case LayerKind::dense: {
            grads.layers[idx].dweights = matmul_at_b(x, grad);
            auto& dbias = grads.layers[idx].dbias;
            dbias.assign(layer.spec.out_width, 0.0);
            for (int r = 0; r < grad.rows(); ++r) {
                const double* row = grad.row(r).data();
                for (int c = 0; c < grad.cols(); ++c) dbias[c] += row[c];
            }
            grad = matmul_a_bt(grad, layer.params.weights);
            break;
        }
        case LayerKind::relu: {
            for (std::size_t j = 0; j < grad.size(); ++j) {
                if (x.data()[j] <= 0.0) grad.data()[j] = 0.0;
            }
            break;
        }
        case LayerKind::linear:
            break;
        case LayerKind::batch_power_norm: {
            if (layer.spec.norm_mode == PowerMode::per_codeword) {
                const double target = std::sqrt(static_cast<double>(layer.spec.out_width));
                for (int r = 0; r < grad.rows(); ++r) {
                    auto xr = x.row(r);
                    auto gr = grad.row(r);
                    double norm_sq = 0.0, dot = 0.0;
                    for (int j = 0; j < layer.spec.out_width; ++j) {
                        norm_sq += xr[j] * xr[j];
                        dot += xr[j] * gr[j];
                    }
                    const double inv_norm = 1.0 / std::sqrt(norm_sq);
                    const double c = target * inv_norm;
                    for (int j = 0; j < layer.spec.out_width; ++j) {
                        gr[j] = c * (gr[j] - xr[j] * dot * inv_norm * inv_norm);
                    }
                }
            } else {
                // y = x / sqrt(p) with p the batch mean power; the statistic
                // itself is differentiated through.
                const double p = cache.norm_batch_power[idx];
                const double c = 1.0 / std::sqrt(p);
                double dot = 0.0;
                for (std::size_t j = 0; j < grad.size(); ++j) dot += grad.data()[j] * x.data()[j];
                const double correction = dot / (p * static_cast<double>(x.size()));
                for (std::size_t j = 0; j < grad.size(); ++j) {
                    grad.data()[j] = c * (grad.data()[j] - x.data()[j] * correction);
                }
            }
            break;
        }
        case LayerKind::softmax: {
            const Tensor2& y = (idx + 1 < net.layers.size()) ? cache.inputs[idx + 1] : cache.output;
            for (int r = 0; r < grad.rows(); ++r) {
                auto yr = y.row(r);
                auto gr = grad.row(r);
                double dot = 0.0;
                for (int j = 0; j < grad.cols(); ++j) dot += gr[j] * yr[j];
                for (int j = 0; j < grad.cols(); ++j) gr[j] = yr[j] * (gr[j] - dot);
            }
            break;
        }
        }
    }
    return grad;
}

} // namespace

bool Network::all_finite() const {
    for (const Layer& layer : layers) {
        if (!layer.params.weights.empty() && !layer.params.weights.all_finite()) return false;
        for (double b : layer.params.bias) {
            if (!std::isfinite(b)) return false;
        }
        if (!std::isfinite(layer.params.norm_running_scale)) return false;
    }
    return true;
}

bool GradientSet::all_finite() const {
    for (const LayerGrads& g : layers) {
        if (!g.dweights.empty() && !g.dweights.all_finite()) return false;
        for (double b : g.dbias) {
            if (!std::isfinite(b)) return false;
        }
    }
    return true;
}

void GradientSet::scale_and_add(const GradientSet& other, double factor) {
    if (layers.size() != other.layers.size()) throw UsageError("gradient set size mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].dweights.empty()) continue;
        for (std::size_t j = 0; j < layers[i].dweights.size(); ++j) {
            layers[i].dweights.data()[j] += factor * other.layers[i].dweights.data()[j];
        }
        for (std::size_t j = 0; j < layers[i].dbias.size(); ++j) {
            layers[i].dbias[j] += factor * other.layers[i].dbias[j];
        }
    }
}

Network make_network(std::span<const LayerSpec> specs, RngStream& rng) {
    if (specs.empty()) throw ConfigError("network needs at least one layer");
    Network net;
    int expected_width = specs.front().in_width;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        validate_spec(specs[i], static_cast<int>(i));
        if (specs[i].in_width != expected_width) {
            throw ConfigError("layer " + std::to_string(i) + " in_width does not chain with previous out_width");
        }
        expected_width = specs[i].out_width;
        Layer layer;
        layer.spec = specs[i];
        if (specs[i].kind == LayerKind::dense) {
            const double bound = std::sqrt(6.0 / (specs[i].in_width + specs[i].out_width));
            layer.params.weights = Tensor2(specs[i].in_width, specs[i].out_width);
            for (double& w : layer.params.weights.data()) w = rng.uniform(-bound, bound);
            layer.params.bias.assign(specs[i].out_width, 0.0);
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

Tensor2 infer(const Network& net, const Tensor2& input) {
    // infer never mutates; cast confined here so the train/infer paths share code
    return run_forward(const_cast<Network&>(net), input, Mode::infer, nullptr, false);
}

Tensor2 forward_train(Network& net, const Tensor2& input, ForwardCache& cache, bool update_norm_stats) {
    return run_forward(net, input, Mode::train, &cache, update_norm_stats);
}

Tensor2 backward(const Network& net, const ForwardCache& cache, const Tensor2& output_grad, GradientSet& grads) {
    if (!output_grad.same_shape(cache.output)) throw UsageError("output_grad shape does not match forward output");
    return run_backward(net, cache, output_grad, net.layers.size(), grads);
}

Tensor2 backward_from_logits(const Network& net, const ForwardCache& cache, const Tensor2& logit_grad, GradientSet& grads) {
    if (net.layers.empty() || net.layers.back().spec.kind != LayerKind::softmax) {
        throw UsageError("backward_from_logits requires a softmax output layer");
    }
    return run_backward(net, cache, logit_grad, net.layers.size() - 1, grads);
}

GradientSet make_zero_gradients(const Network& net) {
    GradientSet grads;
    grads.layers.resize(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        if (net.layers[i].spec.kind == LayerKind::dense) {
            grads.layers[i].dweights = Tensor2(net.layers[i].spec.in_width, net.layers[i].spec.out_width, 0.0);
            grads.layers[i].dbias.assign(net.layers[i].spec.out_width, 0.0);
        }
    }
    return grads;
}

CrossEntropyResult cross_entropy_loss_and_grad(const Tensor2& posterior, std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != posterior.rows()) {
        throw UsageError("targets length must equal posterior rows");
    }
    const int batch = posterior.rows();
    const int width = posterior.cols();
    CrossEntropyResult result;
    result.logit_grad = posterior;
    const double inv_batch = 1.0 / batch;
    double total = 0.0;
    for (int r = 0; r < batch; ++r) {
        const int target = targets[r];
        if (target < 0 || target >= width) throw UsageError("target index out of range at row " + std::to_string(r));
        auto row = posterior.row(r);
        double sum = 0.0;
        for (double v : row) sum += v;
        if (std::abs(sum - 1.0) > 1e-6) {
            throw UsageError("posterior row " + std::to_string(r) + " does not sum to 1");
        }
        double p = row[target];
        if (p < kPosteriorFloor) {
            p = kPosteriorFloor;
            ++result.saturated_rows;
        }
        total -= std::log(p);
        auto grad_row = result.logit_grad.row(r);
        for (double& v : grad_row) v *= inv_batch;
        grad_row[target] -= inv_batch;
    }
    result.loss = total * inv_batch;
    return result;
}

void OptimizerConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0) throw ConfigError("adam betas must lie in (0,1)");
    if (epsilon <= 0.0) throw ConfigError("adam epsilon must be > 0");
}

OptimizerState make_optimizer(const Network& net, const OptimizerConfig& config) {
    config.validate();
    OptimizerState state;
    state.config = config;
    state.first_moment = make_zero_gradients(net);
    state.second_moment = make_zero_gradients(net);
    return state;
}

void optimizer_step(Network& net, const GradientSet& grads, OptimizerState& state) {
    if (grads.layers.size() != net.layers.size()) throw UsageError("gradient set does not match network");
    if (!grads.all_finite()) throw NumericalError("non-finite gradient; parameters left untouched");

    state.step_count += 1;
    const OptimizerConfig& cfg = state.config;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_count));

    auto update = [&](double& param, double grad, double& m, double& v) {
        if (cfg.kind == OptKind::sgd) {
            param -= cfg.learning_rate * grad;
            return;
        }
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
        const double m_hat = m / bias1;
        const double v_hat = v / bias2;
        param -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    };

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& layer = net.layers[i];
        if (layer.spec.kind != LayerKind::dense) continue;
        auto& gw = grads.layers[i].dweights;
        auto& mw = state.first_moment.layers[i].dweights;
        auto& vw = state.second_moment.layers[i].dweights;
        for (std::size_t j = 0; j < layer.params.weights.size(); ++j) {
            update(layer.params.weights.data()[j], gw.data()[j], mw.data()[j], vw.data()[j]);
        }
        for (std::size_t j = 0; j < layer.params.bias.size(); ++j) {
            update(layer.params.bias[j], grads.layers[i].dbias[j], state.first_moment.layers[i].dbias[j], state.second_moment.layers[i].dbias[j]);
        }
    }
}

namespace {

double evaluate_loss(Network& net, const Tensor2& input, std::span<const int> targets) {
    ForwardCache cache;
    const Tensor2 out = forward_train(net, input, cache, false);
    if (net.layers.back().spec.kind == LayerKind::softmax) {
        return cross_entropy_loss_and_grad(out, targets).loss;
    }
    // mean target-indexed output: a linear functional, exact for linear nets
    double total = 0.0;
    for (int r = 0; r < out.rows(); ++r) total += out.at(r, targets[r]);
    return total / out.rows();
}

} // namespace

double finite_difference_check(Network& net, const Tensor2& input, std::span<const int> targets, double perturbation) {
    if (perturbation <= 0.0) throw UsageError("perturbation must be > 0");
    if (static_cast<int>(targets.size()) != input.rows()) throw UsageError("targets length must equal the batch size");
    for (int t : targets) {
        if (t < 0 || t >= net.output_width()) throw UsageError("target index exceeds the network output width");
    }

    ForwardCache cache;
    const Tensor2 out = forward_train(net, input, cache, false);
    GradientSet grads = make_zero_gradients(net);
    if (net.layers.back().spec.kind == LayerKind::softmax) {
        auto ce = cross_entropy_loss_and_grad(out, targets);
        backward_from_logits(net, cache, ce.logit_grad, grads);
    } else {
        Tensor2 out_grad(out.rows(), out.cols(), 0.0);
        const double inv_batch = 1.0 / out.rows();
        for (int r = 0; r < out.rows(); ++r) out_grad.at(r, targets[r]) = inv_batch;
        backward(net, cache, out_grad, grads);
    }

    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + perturbation;
        const double up = evaluate_loss(net, input, targets);
        param = saved - perturbation;
        const double down = evaluate_loss(net, input, targets);
        param = saved;
        const double numeric = (up - down) / (2.0 * perturbation);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& layer = net.layers[i];
        if (layer.spec.kind != LayerKind::dense) continue;
        for (std::size_t j = 0; j < layer.params.weights.size(); ++j) {
            probe(layer.params.weights.data()[j], grads.layers[i].dweights.data()[j]);
        }
        for (std::size_t j = 0; j < layer.params.bias.size(); ++j) {
            probe(layer.params.bias[j], grads.layers[i].dbias[j]);
        }
    }
    return worst;
}

} // namespace icae
