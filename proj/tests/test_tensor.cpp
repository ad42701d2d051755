#include <limits>

#include "doctest.h"

#include "icae/errors.hpp"
#include "icae/rng.hpp"
#include "icae/tensor.hpp"

using namespace icae;

TEST_SUITE_BEGIN("tensor");

TEST_CASE("construction validates shape") {
    const Tensor2 t(2, 3, 1.5);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    CHECK(t.at(1, 2) == 1.5);
    CHECK_THROWS_AS(Tensor2(0, 3), UsageError);
    CHECK_THROWS_AS(Tensor2(2, -1), UsageError);
}

TEST_CASE("matmul small known product") {
    Tensor2 a(2, 3);
    a.at(0, 0) = 1; a.at(0, 1) = 2; a.at(0, 2) = 3;
    a.at(1, 0) = 4; a.at(1, 1) = 5; a.at(1, 2) = 6;
    Tensor2 b(3, 2);
    b.at(0, 0) = 7; b.at(0, 1) = 8;
    b.at(1, 0) = 9; b.at(1, 1) = 10;
    b.at(2, 0) = 11; b.at(2, 1) = 12;

    const Tensor2 c = matmul(a, b);
    CHECK(c.at(0, 0) == 58);
    CHECK(c.at(0, 1) == 64);
    CHECK(c.at(1, 0) == 139);
    CHECK(c.at(1, 1) == 154);
    CHECK_THROWS_AS(matmul(a, a), UsageError);
}

TEST_CASE("transposed products agree with explicit transpose") {
    RngStream rng(42, 0);
    Tensor2 a(4, 3), b(4, 5);
    for (double& v : a.data()) v = rng.uniform(-1, 1);
    for (double& v : b.data()) v = rng.uniform(-1, 1);

    Tensor2 at(3, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 3; ++c) at.at(c, r) = a.at(r, c);
    }
    const Tensor2 direct = matmul(at, b);
    const Tensor2 fused = matmul_at_b(a, b);
    REQUIRE(direct.same_shape(fused));
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct.data()[i] == doctest::Approx(fused.data()[i]).epsilon(1e-12));
    }

    Tensor2 bt(5, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 5; ++c) bt.at(c, r) = b.at(r, c);
    }
    const Tensor2 fused2 = matmul_a_bt(at, bt); // (3x4)(5x4)^T = 3x5
    const Tensor2 direct2 = matmul(at, b);
    REQUIRE(fused2.same_shape(direct2));
    for (std::size_t i = 0; i < fused2.size(); ++i) {
        CHECK(fused2.data()[i] == doctest::Approx(direct2.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("all_finite flags bad entries") {
    Tensor2 t(1, 2, 0.0);
    CHECK(t.all_finite());
    t.at(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(t.all_finite());
}

TEST_SUITE_END();
