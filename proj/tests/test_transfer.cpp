#include <cmath>

#include <gtest/gtest.h>

#include "edgeweight/recurrence.hpp"
#include "edgeweight/transfer.hpp"
#include "edgeweight/wkb.hpp"

using namespace edgeweight;

TEST(Kooman, FactorizationOfTheFreeStep) {
    for (double k : {0.01, 0.7, 2.0, 3.1}) {
        const auto f = kooman_factors(k);
        const Mat2C target{2.0 * std::cos(k), -1.0, 1.0, 0.0};
        EXPECT_LT((f.Y * f.V * f.Y_inv).max_entry_diff(target), 1e-12 / std::sin(k)) << k;
        EXPECT_LT((f.Y * f.Y_inv).max_entry_diff(Mat2C::identity()), 1e-12 / std::sin(k)) << k;
        EXPECT_LT(f.Y_inv.max_entry_diff(f.Y.inverse()), 1e-12 / std::sin(k)) << k;
    }
    EXPECT_THROW(kooman_factors(0.0), DomainError);
}

TEST(Kooman, NormOfYInverse) {
    // ||Y(k)^{-1}|| = 1 / (2 min(sin(k/2), cos(k/2))).
    for (double k : {0.05, 1.0, 2.5, 3.0})
        EXPECT_NEAR(kooman_factors(k).Y_inv.norm(), 0.5 / std::min(std::sin(0.5 * k), std::cos(0.5 * k)), 1e-12) << k;
}

TEST(Mat2, NormMatchesSingularValues) {
    const Mat2C m{3.0, 1.0, -2.0, 0.5};
    // Singular values of a real 2x2 from the eigenvalues of M^T M.
    const double p = 9 + 4, q = 1 + 0.25, r = 3 * 1 + (-2) * 0.5;
    const double lmax = 0.5 * (p + q) + std::sqrt(0.25 * (p - q) * (p - q) + r * r);
    EXPECT_NEAR(m.norm(), std::sqrt(lmax), 1e-13);
    EXPECT_NEAR(m.norm() * m.min_singular(), std::abs(3.0 * 0.5 + 2.0), 1e-13);
}

TEST(Consecutive, ExactNormBelowBound) {
    for (double k0 : {0.2, 1.0, 2.0})
        for (double dk : {-0.1, -0.01, 0.0, 0.01}) {
            const double k1 = k0 + dk;
            EXPECT_LE(consecutive_norm(k0, k1), consecutive_bound(k0, k1) + 1e-12);
        }
    EXPECT_NEAR(consecutive_norm(1.0, 1.0), 1.0, 1e-12);
}

TEST(StepMatrix, PropagatesPolynomials) {
    const auto m = ParameterModel::power_law_b(0.8, 0.6);
    const double x = 1.93;
    ScaledMat2 T;
    for (std::int64_t n = 1; n <= 30; ++n) T.left_multiply(step_matrix_real(m, x, n));
    // T_30 applied to (p_0, a_0 p_{-1}) = (1, 0) gives (p_30, a_30 p_29).
    const auto s = advance_to(m, x, 30);
    EXPECT_NEAR(std::log(std::abs(T.m[0])) + T.exp2 * kLn2, s.log_abs_p(), 1e-10);
    EXPECT_NEAR(T.log_abs_det(), 0.0, 1e-10);
}

TEST(Chain, BCaseOrdering) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    for (double d : {0.1, 0.01}) {
        const auto pt = EdgePoint::from_delta(d);
        const auto N = turning_index(m, pt);
        const auto c = transfer_chain(m, pt, N + 1, N + 5000);
        EXPECT_LE(c.max_direct_over_product, 1e-10) << d;
        EXPECT_LE(c.max_product_over_closed, 1e-10) << d;
        EXPECT_LT(c.max_abs_log_det, 1e-6) << d;
    }
}

TEST(Chain, ACaseOrdering) {
    const auto m = ParameterModel::log_law_a(MonotoneF::power(1.0));
    for (double x : {1.5, -1.6}) {
        const auto pt = EdgePoint::at(x);
        const auto N = turning_index(m, pt);
        const auto c = transfer_chain(m, pt, N + 1, N + 3000);
        EXPECT_LE(c.max_direct_over_product, 1e-10) << x;
        EXPECT_LE(c.max_product_over_closed, 1e-10) << x;
    }
}

TEST(Chain, RejectsHyperbolicStart) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    const auto pt = EdgePoint::from_delta(0.1);
    EXPECT_THROW(transfer_chain(m, pt, 50, 60), DomainError);
    EXPECT_THROW(transfer_chain(m, pt, 200, 200), DomainError);
}

TEST(Chain, EllipticBoundSeries) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    const auto pt = EdgePoint::from_delta(0.05);
    const auto b = elliptic_norm_bound(m, pt, 402, 1402);
    EXPECT_NEAR(b.log_closed, closed_transfer_bound(false, kappa_n(m, pt, 402), kappa_infinity(pt)), 1e-14);
    EXPECT_LE(b.log_product_at_end, b.log_closed + 1e-10);
}

TEST(LowerEdge, DirectNormBelowConstant) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    for (double x : {-0.5, -1.5, -1.9, -1.99}) {
        const auto e = lower_edge_envelope(m, x);
        EXPECT_LT(e.log_w_lower, e.log_w_upper);
        for (std::int64_t n : {2, 10, 100, 10000}) EXPECT_LE(lower_edge_direct_log_norm(m, x, n), e.log_K + 1e-10) << x << " " << n;
    }
    EXPECT_THROW(lower_edge_envelope(m, 0.5), DomainError);
    EXPECT_THROW(lower_edge_envelope(ParameterModel::log_law_a(MonotoneF::power(1.0)), -1.0), DomainError);
}
