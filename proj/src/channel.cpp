#include "icae/channel.hpp"

#include <cmath>

#include "icae/errors.hpp"

namespace icae {

double noise_sigma(double eb_n0_db, double rate) {
    if (rate <= 0.0) throw ConfigError("code rate must be > 0");
    const double eb_n0 = std::pow(10.0, eb_n0_db / 10.0);
    return std::sqrt(1.0 / (2.0 * rate * eb_n0));
}

ChannelParams make_channel_params(double alpha, double eb_n0_db, double rate) {
    if (alpha < 0.0) throw ConfigError("interference strength alpha must be >= 0");
    ChannelParams params;
    params.alpha = alpha;
    params.eb_n0_db = eb_n0_db;
    params.rate = rate;
    params.sigma = noise_sigma(eb_n0_db, rate);
    return params;
}

Tensor2 awgn(int batch, int width, double sigma, RngStream& rng) {
    Tensor2 out(batch, width);
    rng.fill_normal(out, sigma);
    return out;
}

Tensor2 superpose(const Tensor2& z_own, const Tensor2& z_other, double alpha, const Tensor2& noise) {
    if (!z_own.same_shape(z_other) || !z_own.same_shape(noise)) {
        throw UsageError("superpose requires all three tensors to share one shape");
    }
    // fixed evaluation order (own + alpha*other, then + noise) so results are
    // bit-reproducible and recomputable by tests
    Tensor2 out = z_own;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = (z_own.data()[i] + alpha * z_other.data()[i]) + noise.data()[i];
    }
    return out;
}

} // namespace icae
