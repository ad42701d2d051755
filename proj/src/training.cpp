#include "icae/training.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "icae/channel.hpp"
#include "icae/errors.hpp"

namespace icae {

void TrainingConfig::validate() const {
    arch.validate();
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (snr_low_db > snr_high_db) throw ConfigError("snr range: low must be <= high");
    if (epochs < 1 || batches_per_epoch < 1) throw ConfigError("epochs and batches_per_epoch must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (arch.power_mode == PowerMode::batch_average && batch_size < 2) {
        throw ConfigError("batch_size must be >= 2 in batch_average mode (the power constraint needs a batch statistic)");
    }
    optimizer.validate();
}

double sample_snr_db(double low_db, double high_db, RngStream& rng) {
    if (low_db > high_db) throw UsageError("snr range: low must be <= high");
    return rng.uniform(low_db, high_db);
}

PairOptimizers make_pair_optimizers(const TrainedPair& pair, const OptimizerConfig& config) {
    PairOptimizers opt;
    opt.encoder1 = make_optimizer(pair.encoder1, config);
    opt.decoder1 = make_optimizer(pair.decoder1, config);
    opt.encoder2 = make_optimizer(pair.encoder2, config);
    opt.decoder2 = make_optimizer(pair.decoder2, config);
    return opt;
}

double twinnet_half_step(TrainedPair& pair, PairOptimizers& opt, int user, double alpha, double sigma, int batch_size, RngStream& rng) {
    const int other = user == 1 ? 2 : 1;
    const int message_count = pair.arch.message_count();

    const MessageBatch msgs_own = random_messages(batch_size, message_count, rng);
    const MessageBatch msgs_other = random_messages(batch_size, message_count, rng);

    // interference enters as a constant input: inference pass, no gradients
    const Tensor2 interference = infer(pair.encoder(other), msgs_other.one_hot);

    Network& enc = pair.encoder(user);
    Network& dec = pair.decoder(user);
    ForwardCache enc_cache, dec_cache;
    const Tensor2 z = forward_train(enc, msgs_own.one_hot, enc_cache);
    const Tensor2 noise = awgn(batch_size, pair.arch.n, sigma, rng);
    const Tensor2 y = superpose(z, interference, alpha, noise);
    const Tensor2 posterior = forward_train(dec, y, dec_cache);

    const auto ce = cross_entropy_loss_and_grad(posterior, msgs_own.indices);
    GradientSet dec_grads = make_zero_gradients(dec);
    const Tensor2 grad_y = backward_from_logits(dec, dec_cache, ce.logit_grad, dec_grads);
    GradientSet enc_grads = make_zero_gradients(enc);
    backward(enc, enc_cache, grad_y, enc_grads);

    optimizer_step(dec, dec_grads, user == 1 ? opt.decoder1 : opt.decoder2);
    optimizer_step(enc, enc_grads, user == 1 ? opt.encoder1 : opt.encoder2);
    return ce.loss;
}

std::pair<double, double> siamesenet_batch_step(TrainedPair& pair, PairOptimizers& opt, double alpha, double sigma, int batch_size, RngStream& rng) {
    const int message_count = pair.arch.message_count();

    const MessageBatch msgs1 = random_messages(batch_size, message_count, rng);
    const MessageBatch msgs2 = random_messages(batch_size, message_count, rng);

    ForwardCache enc1_cache, enc2_cache, dec1_cache, dec2_cache;
    const Tensor2 z1 = forward_train(pair.encoder1, msgs1.one_hot, enc1_cache);
    const Tensor2 z2 = forward_train(pair.encoder2, msgs2.one_hot, enc2_cache);
    const Tensor2 n1 = awgn(batch_size, pair.arch.n, sigma, rng);
    const Tensor2 n2 = awgn(batch_size, pair.arch.n, sigma, rng);
    const Tensor2 y1 = superpose(z1, z2, alpha, n1);
    const Tensor2 y2 = superpose(z2, z1, alpha, n2);
    const Tensor2 posterior1 = forward_train(pair.decoder1, y1, dec1_cache);
    const Tensor2 posterior2 = forward_train(pair.decoder2, y2, dec2_cache);

    const auto ce1 = cross_entropy_loss_and_grad(posterior1, msgs1.indices);
    const auto ce2 = cross_entropy_loss_and_grad(posterior2, msgs2.indices);

    GradientSet dec1_grads = make_zero_gradients(pair.decoder1);
    GradientSet dec2_grads = make_zero_gradients(pair.decoder2);
    const Tensor2 grad_y1 = backward_from_logits(pair.decoder1, dec1_cache, ce1.logit_grad, dec1_grads);
    const Tensor2 grad_y2 = backward_from_logits(pair.decoder2, dec2_cache, ce2.logit_grad, dec2_grads);

    // dL/dz_i picks up the direct path plus the alpha-scaled cross path, so
    // each encoder is trained by both receivers' losses with equal weight.
    Tensor2 grad_z1 = grad_y1;
    Tensor2 grad_z2 = grad_y2;
    for (std::size_t j = 0; j < grad_z1.size(); ++j) {
        grad_z1.data()[j] += alpha * grad_y2.data()[j];
        grad_z2.data()[j] += alpha * grad_y1.data()[j];
    }

    GradientSet enc1_grads = make_zero_gradients(pair.encoder1);
    GradientSet enc2_grads = make_zero_gradients(pair.encoder2);
    backward(pair.encoder1, enc1_cache, grad_z1, enc1_grads);
    backward(pair.encoder2, enc2_cache, grad_z2, enc2_grads);

    optimizer_step(pair.decoder1, dec1_grads, opt.decoder1);
    optimizer_step(pair.decoder2, dec2_grads, opt.decoder2);
    optimizer_step(pair.encoder1, enc1_grads, opt.encoder1);
    optimizer_step(pair.encoder2, enc2_grads, opt.encoder2);
    return {ce1.loss, ce2.loss};
}

namespace {

// Abort instead of writing NaN models to disk.
class DivergenceGuard {
public:
    void check_epoch(int epoch, double loss1, double loss2) {
        if (!std::isfinite(loss1) || !std::isfinite(loss2)) {
            throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch));
        }
        if (epoch == 0) {
            initial1_ = loss1;
            initial2_ = loss2;
            return;
        }
        if (loss1 > 10.0 * initial1_ || loss2 > 10.0 * initial2_) {
            ++streak_;
        } else {
            streak_ = 0;
        }
        if (streak_ >= 3) {
            throw NumericalError("training diverged: loss above 10x the initial level for 3 consecutive epochs (epoch " + std::to_string(epoch) + ")");
        }
    }

private:
    double initial1_ = 0.0;
    double initial2_ = 0.0;
    int streak_ = 0;
};

TrainingResult run_training(const TrainingConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    TrainedPair pair = build_pair(config.arch, config.seed);
    pair.model_kind = config.model_kind;
    pair.train_alpha = config.alpha;
    pair.snr_low_db = config.snr_low_db;
    pair.snr_high_db = config.snr_high_db;
    PairOptimizers opt = make_pair_optimizers(pair, config.optimizer);
    RngStream rng(config.seed, streams::training_loop);

    TrainingTrace trace;
    DivergenceGuard guard;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss1 = 0.0, loss2 = 0.0, ebn0 = 0.0;
        for (int b = 0; b < config.batches_per_epoch; ++b) {
            // one Eb/N0 draw per batch, shared by both users
            const double ebn0_db = sample_snr_db(config.snr_low_db, config.snr_high_db, rng);
            const double sigma = noise_sigma(ebn0_db, config.arch.rate());
            if (config.model_kind == ModelKind::twin) {
                loss1 += twinnet_half_step(pair, opt, 1, config.alpha, sigma, config.batch_size, rng);
                loss2 += twinnet_half_step(pair, opt, 2, config.alpha, sigma, config.batch_size, rng);
            } else {
                const auto [l1, l2] = siamesenet_batch_step(pair, opt, config.alpha, sigma, config.batch_size, rng);
                loss1 += l1;
                loss2 += l2;
            }
            ebn0 += ebn0_db;
        }
        trace.loss_user1.push_back(loss1 / config.batches_per_epoch);
        trace.loss_user2.push_back(loss2 / config.batches_per_epoch);
        trace.mean_ebn0_db.push_back(ebn0 / config.batches_per_epoch);
        guard.check_epoch(epoch, trace.loss_user1.back(), trace.loss_user2.back());
    }

    trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(pair), std::move(trace)};
}

} // namespace

TrainingResult train_twinnet(const TrainingConfig& config) {
    if (config.model_kind != ModelKind::twin) throw ConfigError("train_twinnet requires model_kind = twin");
    return run_training(config);
}

TrainingResult train_siamesenet(const TrainingConfig& config) {
    if (config.model_kind != ModelKind::siamese) throw ConfigError("train_siamesenet requires model_kind = siamese");
    return run_training(config);
}

TrainingResult train(const TrainingConfig& config) {
    return config.model_kind == ModelKind::twin ? train_twinnet(config) : train_siamesenet(config);
}

} // namespace icae
