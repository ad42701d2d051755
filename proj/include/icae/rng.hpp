#pragma once

#include <cstdint>

#include "icae/tensor.hpp"

namespace icae {

// Counter-based random stream (Philox4x32-10). The generator is a pure
// function of (seed, stream, block counter), so distinct stream indices
// yield non-overlapping sequences and a copied RngStream replays exactly.
// Uniform output is bit-identical across platforms; Gaussian output is
// deterministic per platform (Box-Muller goes through libm).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    // [0, 1)
    double uniform();
    // [lo, hi)
    double uniform(double lo, double hi);
    // [0, count), unbiased
    int uniform_index(int count);
    // standard normal
    double normal();
    // i.i.d. N(0, sigma^2) entries; sigma = 0 fills zeros without consuming
    void fill_normal(Tensor2& out, double sigma);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int buf_used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

// Stream-index allocation. One master seed per experiment; every consumer
// owns a labelled stream so parallel evaluation points never collide with
// each other or with training draws.
namespace streams {

// encoder1=0, decoder1=1, encoder2=2, decoder2=3
inline constexpr std::uint64_t net_init(int net_index) { return 0x100u + static_cast<std::uint64_t>(net_index); }
inline constexpr std::uint64_t training_loop = 0x200u;
inline constexpr std::uint64_t eval_point(std::uint64_t point_index) { return (1ull << 32) + point_index; }

} // namespace streams

} // namespace icae
