#include <doctest.h>

#include "otfs/transforms.hpp"
#include "oracles.hpp"

using namespace otfs;

TEST_CASE("isfft of a single pilot impulse spreads flat") {
    const OtfsParams p = oracle::dims_only(8, 4);
    DDGrid x(4, 8);
    const cd xp(0.7, -0.3);
    x.at(0, 0) = xp;
    const TFGrid X = isfft(x, p);
    const cd want = xp / std::sqrt(32.0);
    for (const cd& z : X.v) CHECK(std::abs(z - want) < 1e-14);
}

TEST_CASE("isfft of zeros is zero") {
    const OtfsParams p = oracle::dims_only(8, 4);
    DDGrid x(4, 8);
    const TFGrid X = isfft(x, p);
    for (const cd& z : X.v) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("isfft matches the double-sum oracle and preserves energy") {
    const OtfsParams p = oracle::dims_only(4, 2);
    const DDGrid x = oracle::random_dd(4, 2, 11);
    const TFGrid X = isfft(x, p);
    const TFGrid ref = oracle::isfft_direct(x);
    CHECK(rel_error(X, ref) < 1e-12);
    CHECK(std::abs(X.frobenius() - x.frobenius()) < 1e-12 * x.frobenius());
}

TEST_CASE("sfft matches the double-sum oracle") {
    const OtfsParams p = oracle::dims_only(4, 2);
    const TFGrid Y = oracle::random_tf(4, 2, 12);
    CHECK(rel_error(sfft(Y, p), oracle::sfft_direct(Y)) < 1e-12);
}

TEST_CASE("sfft inverts isfft to machine precision") {
    const OtfsParams p = oracle::dims_only(8, 4);
    const DDGrid x = oracle::random_dd(8, 4, 13);
    const DDGrid back = sfft(isfft(x, p), p);
    CHECK(rel_error(back, x) < 1e-13);
}

TEST_CASE("sfft of a flat grid collapses to the origin bin") {
    const OtfsParams p = oracle::dims_only(8, 4);
    TFGrid Y(4, 8);
    const cd c(0.4, 1.1);
    Y.fill(c);
    const DDGrid y = sfft(Y, p);
    CHECK(std::abs(y.at(0, 0) - c * std::sqrt(32.0)) < 1e-12);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 8; ++l)
            if (k || l) CHECK(std::abs(y.at(k, l)) < 1e-12);
}

TEST_CASE("unitarity and round trip across power-of-two grids") {
    for (int M : {2, 4, 8, 16, 64, 512}) {
        for (int N : {2, 4, 8, 32, 512}) {
            if (static_cast<long>(M) * N >= 1000000L) continue;
            const OtfsParams p = oracle::dims_only(M, N);
            const DDGrid x = oracle::random_dd(M, N, 1000 + M + N);
            const TFGrid X = isfft(x, p);
            CHECK(std::abs(X.frobenius() / x.frobenius() - 1.0) < 1e-10);
            CHECK(rel_error(sfft(X, p), x) < 1e-10);
        }
    }
}

TEST_CASE("isfft is linear") {
    const OtfsParams p = oracle::dims_only(16, 8);
    const DDGrid x1 = oracle::random_dd(16, 8, 21);
    const DDGrid x2 = oracle::random_dd(16, 8, 22);
    const cd a(0.3, -1.2), b(-0.8, 0.45);
    DDGrid mix(8, 16);
    for (size_t i = 0; i < mix.size(); ++i) mix.v[i] = a * x1.v[i] + b * x2.v[i];
    const TFGrid lhs = isfft(mix, p);
    const TFGrid X1 = isfft(x1, p), X2 = isfft(x2, p);
    TFGrid rhs(8, 16);
    for (size_t i = 0; i < rhs.size(); ++i) rhs.v[i] = a * X1.v[i] + b * X2.v[i];
    CHECK(rel_error(lhs, rhs) < 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
    const OtfsParams p = oracle::dims_only(8, 4);
    DDGrid x(4, 4);
    CHECK_THROWS_AS((void)isfft(x, p), std::invalid_argument);
    TFGrid Y(2, 8);
    CHECK_THROWS_AS((void)sfft(Y, p), std::invalid_argument);
}

TEST_CASE("kernel transform pair is mutually inverse and 1/sqrt(NM) off sfft") {
    const OtfsParams p = oracle::dims_only(16, 8);
    const TFGrid H = oracle::random_tf(16, 8, 31);
    const DDGrid h = dd_kernel_from_tf_diag(H, p);
    const DDGrid h_ref = sfft(H, p);
    const double s = std::sqrt(static_cast<double>(p.grid_size()));
    for (size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h.v[i] * s - h_ref.v[i]) < 1e-12);
    CHECK(rel_error(tf_diag_from_dd_kernel(h, p), H) < 1e-12);
}
