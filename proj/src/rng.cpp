#include "icae/rng.hpp"

#include <cmath>
#include <numbers>

#include "icae/errors.hpp"

namespace icae {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

void philox4x32_10(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t next[4] = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        ctr[0] = next[0];
        ctr[1] = next[1];
        ctr[2] = next[2];
        ctr[3] = next[3];
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

void RngStream::refill() {
    buf_[0] = static_cast<std::uint32_t>(block_);
    buf_[1] = static_cast<std::uint32_t>(block_ >> 32);
    buf_[2] = static_cast<std::uint32_t>(stream_);
    buf_[3] = static_cast<std::uint32_t>(stream_ >> 32);
    philox4x32_10(buf_, static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32));
    ++block_;
    buf_used_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (buf_used_ > 2) refill();
    const std::uint64_t lo = buf_[buf_used_];
    const std::uint64_t hi = buf_[buf_used_ + 1];
    buf_used_ += 2;
    return (hi << 32) | lo;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

int RngStream::uniform_index(int count) {
    if (count < 1) throw UsageError("uniform_index requires count >= 1");
    const auto n = static_cast<std::uint64_t>(count);
    if ((n & (n - 1)) == 0) return static_cast<int>(next_u64() & (n - 1));
    // rejection sampling over the largest multiple of count
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<int>(x % n);
}

double RngStream::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // u1 in (0,1] keeps the log finite
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

void RngStream::fill_normal(Tensor2& out, double sigma) {
    if (sigma < 0.0) throw UsageError("fill_normal requires sigma >= 0");
    if (sigma == 0.0) {
        for (double& v : out.data()) v = 0.0;
        return;
    }
    for (double& v : out.data()) v = sigma * normal();
}

} // namespace icae
