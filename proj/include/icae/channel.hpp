#pragma once

#include "icae/rng.hpp"
#include "icae/tensor.hpp"

namespace icae {

// Two-user symmetric-interference AWGN channel: y_i = z_i + alpha * z_j + n_i
// with real-valued signals and noise calibrated per real dimension.
struct ChannelParams {
    double alpha = 0.0;
    double eb_n0_db = 0.0;
    double rate = 0.5; // r = k/n
    double sigma = 0.0;
};

ChannelParams make_channel_params(double alpha, double eb_n0_db, double rate);

// sigma = sqrt(1 / (2 * rate * 10^(eb_n0_db/10)))
double noise_sigma(double eb_n0_db, double rate);

Tensor2 awgn(int batch, int width, double sigma, RngStream& rng);

// y = z_own + alpha * z_other + noise, elementwise
Tensor2 superpose(const Tensor2& z_own, const Tensor2& z_other, double alpha, const Tensor2& noise);

} // namespace icae
