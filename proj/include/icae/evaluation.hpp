#pragma once

#include <cstdint>
#include <vector>

#include "icae/model.hpp"
#include "icae/rng.hpp"

namespace icae {

struct StopRule {
    long long min_errors = 200;
    long long max_frames = 2'000'000;
    void validate() const;
};

struct BlerPoint {
    double eb_n0_db = 0.0;
    double alpha_eval = 0.0;
    long long frames = 0;
    long long errors_user1 = 0;
    long long errors_user2 = 0;
    double bler_user1 = 0.0;
    double bler_user2 = 0.0;
};

// Monte Carlo block error rate of one operating point. Frames run until both
// users reach min_errors or max_frames is hit; both users are reported
// separately. Deterministic given the stream.
BlerPoint simulate_bler(const TrainedPair& pair, double alpha_eval, double eb_n0_db, const StopRule& stop, RngStream rng);

// Gaussian tail probability, Q(x) = erfc(x / sqrt(2)) / 2
double q_function(double x);

double bpsk_ber(double eb_n0_db);

// Orthogonal baseline: k uncoded BPSK symbols per block,
// BLER = 1 - (1 - Q(sqrt(2 Eb/N0)))^k
double tdma_bpsk_bler(double eb_n0_db, int k);

// Uncoded BPSK pushed through the same stopping/counting harness; validates
// the estimator against the closed form above.
BlerPoint simulate_bpsk_bler(int k, double eb_n0_db, const StopRule& stop, RngStream rng);

struct SweepResult {
    ModelKind model_kind = ModelKind::twin;
    double train_alpha = 0.0;
    std::vector<double> alphas_eval;
    std::vector<double> snrs_db;
    std::vector<BlerPoint> points; // alpha-major, snr-minor
};

// Full (alpha, snr) grid. Each point owns the derived stream
// (seed, eval_point(index)), so results are identical for any thread count.
SweepResult mismatch_sweep(const TrainedPair& pair, const std::vector<double>& alphas_eval, const std::vector<double>& snrs_db,
                           const StopRule& stop, std::uint64_t seed, int threads = 1);

} // namespace icae
