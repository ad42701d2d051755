#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "icae/rng.hpp"

using namespace icae;

TEST_SUITE_BEGIN("rng");

TEST_CASE("copied stream replays the same sequence") {
    RngStream a(123, 7);
    RngStream b = a;
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams differ") {
    RngStream a(123, 0);
    RngStream b(123, 1);
    int equal = 0;
    for (int i = 0; i < 256; ++i) {
        if (a.next_u64() == b.next_u64()) ++equal;
    }
    CHECK(equal == 0);
}

TEST_CASE("uniform stays in range and fills it") {
    RngStream rng(9, 0);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_index is unbiased over a power-of-two range") {
    RngStream rng(17, 3);
    int counts[16] = {};
    const int draws = 160000;
    for (int i = 0; i < draws; ++i) ++counts[rng.uniform_index(16)];
    for (int c : counts) {
        // 5 sigma band around draws/16
        CHECK(std::abs(c - draws / 16) < 5 * std::sqrt(draws * (1.0 / 16) * (15.0 / 16)));
    }
}

TEST_CASE("normal moments") {
    RngStream rng(31, 2);
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("gaussian sample distribution passes a KS check") {
    RngStream rng(101, 5);
    const int n = 100000;
    std::vector<double> samples(n);
    for (double& s : samples) s = rng.normal();
    std::sort(samples.begin(), samples.end());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-samples[i] / std::sqrt(2.0));
        worst = std::max(worst, std::abs((i + 1.0) / n - cdf));
        worst = std::max(worst, std::abs(cdf - static_cast<double>(i) / n));
    }
    // 1% critical value 1.6276 / sqrt(n)
    CHECK(worst < 1.6276 / std::sqrt(static_cast<double>(n)));
}

TEST_SUITE_END();
