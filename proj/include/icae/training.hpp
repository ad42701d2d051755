#pragma once

#include <cstdint>
#include <vector>

#include "icae/model.hpp"
#include "icae/nn.hpp"
#include "icae/rng.hpp"

namespace icae {

struct TrainingConfig {
    ModelKind model_kind = ModelKind::twin;
    ArchitectureSpec arch;
    double alpha = 1.0;
    double snr_low_db = 1.0;
    double snr_high_db = 12.0;
    int epochs = 100;
    int batches_per_epoch = 200;
    int batch_size = 256;
    OptimizerConfig optimizer;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainingTrace {
    std::vector<double> loss_user1;   // per-epoch mean cross-entropy
    std::vector<double> loss_user2;
    std::vector<double> mean_ebn0_db; // per-epoch mean of the sampled Eb/N0 draws
    double seconds = 0.0;
};

struct TrainingResult {
    TrainedPair pair;
    TrainingTrace trace;
};

// Optimizer state for all four networks of a pair.
struct PairOptimizers {
    OptimizerState encoder1, decoder1, encoder2, decoder2;
};

PairOptimizers make_pair_optimizers(const TrainedPair& pair, const OptimizerConfig& config);

// One half-step of the alternating algorithm: `user` trains against
// gradient-severed interference from the other encoder. Returns the
// cross-entropy loss of this half. Only `user`'s parameters change.
double twinnet_half_step(TrainedPair& pair, PairOptimizers& opt, int user, double alpha, double sigma, int batch_size, RngStream& rng);

// One joint batch: decoders descend on their own loss, each encoder on the
// equally weighted sum of both losses through both channel paths. Returns
// (loss_user1, loss_user2).
std::pair<double, double> siamesenet_batch_step(TrainedPair& pair, PairOptimizers& opt, double alpha, double sigma, int batch_size, RngStream& rng);

// Alternating independent training: per batch, user 1 updates against
// gradient-severed interference from user 2, then user 2 against the just
// updated user 1. Fresh messages and noise for the second half-step.
TrainingResult train_twinnet(const TrainingConfig& config);

// Joint encoder training: decoders descend on their own loss only, each
// encoder on the equally weighted sum of both losses, with gradients flowing
// through both channel paths.
TrainingResult train_siamesenet(const TrainingConfig& config);

TrainingResult train(const TrainingConfig& config);

// uniform draw in the dB domain
double sample_snr_db(double low_db, double high_db, RngStream& rng);

} // namespace icae
