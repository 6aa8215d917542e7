#include <cmath>

#include <boost/math/special_functions/binomial.hpp>
#include <gtest/gtest.h>

#include "edgeweight/asymptotics.hpp"

using namespace edgeweight;

TEST(Coefficients, FirstFewExact) {
    const auto t = arccosh_coeffs(3);
    EXPECT_EQ(t.as_string(0), "1");
    EXPECT_EQ(t.as_string(1), "-1/24");
    EXPECT_EQ(t.as_string(2), "3/640");
    EXPECT_EQ(t.as_string(3), "-5/7168");
    EXPECT_THROW(arccosh_coeffs(-1), DomainError);
}

TEST(Coefficients, MatchCentralBinomialFormula) {
    const auto t = arccosh_coeffs(60);
    for (int l = 0; l <= 60; ++l) {
        // (-1)^l binom(2l, l) / (16^l (2l + 1)) built from an integer binomial.
        boost::multiprecision::cpp_int binom = 1;
        for (int k = 1; k <= l; ++k) binom = binom * (l + k) / k;
        boost::multiprecision::cpp_int den = 1;
        for (int k = 0; k < l; ++k) den *= 16;
        den *= 2 * l + 1;
        Rational expect(binom, den);
        if (l % 2) expect = -expect;
        EXPECT_EQ(t.c[l], expect) << l;
    }
}

TEST(Coefficients, PartialSumReproducesArccosh) {
    const auto t = arccosh_coeffs(40);
    for (double z : {0.1, 0.25, 1.0}) EXPECT_NEAR(t.partial_sum(z), std::acosh(1.0 + 0.5 * z), 1e-12) << z;
}

TEST(Coefficients, RootTestApproachesQuarter) {
    const auto t = arccosh_coeffs(40);
    double prev = 0.0;
    for (int l = 5; l <= 40; ++l) {
        const double r = std::pow(std::abs(t.as_double(l)), 1.0 / l);
        EXPECT_LT(r, 0.25);
        EXPECT_GT(r, prev);
        prev = r;
    }
}

TEST(Coefficients, C20DiffersFromQuotedValueInOneDigit) {
    const auto cmp = compare_c20();
    // Exact value from rational arithmetic: binom(40, 20) / (16^20 * 41).
    EXPECT_EQ(cmp.computed, "34461632205/12391489651049949040738304");
    EXPECT_FALSE(cmp.match);
    ASSERT_EQ(cmp.differing_digits.size(), 1u);
    EXPECT_EQ(cmp.differing_digits[0], 14u);
}

TEST(Series, HalfPowerHasTwoTerms) {
    // beta = 1/2, C = 1: q = (pi/4) delta^{-3/2} - (pi/32) delta^{-1/2}.
    for (double d : {1e-1, 1e-2, 1e-4}) {
        const auto q = q_series(0.5, 1.0, d);
        ASSERT_EQ(q.terms.size(), 2u);
        EXPECT_FALSE(q.borderline_excluded);
        EXPECT_NEAR(q.total / (kPi / 4 * std::pow(d, -1.5) - kPi / 32 * std::pow(d, -0.5)), 1.0, 1e-13);
    }
}

TEST(Series, TermCountAndScaling) {
    EXPECT_EQ(q_series(0.3, 1.0, 0.01).terms.size(), 3u);  // 1/beta - 1/2 = 2.83
    EXPECT_FALSE(q_series(0.3, 1.0, 0.01).borderline_excluded);
    // 1/beta - 1/2 = 1: the l = 1 term is logarithmic and left out.
    EXPECT_EQ(q_series(2.0 / 3.0, 1.0, 0.01).terms.size(), 1u);
    EXPECT_TRUE(q_series(2.0 / 3.0, 1.0, 0.01).borderline_excluded);
    EXPECT_TRUE(q_series(1.0, 1.0, 0.01).terms.size() == 1u);
    EXPECT_TRUE(q_series(1.5, 1.0, 0.01).terms.empty() == false);
    EXPECT_TRUE(q_series(1.9, 1.0, 0.01).terms.empty() == false);
    // C^{1/beta} prefactor.
    EXPECT_NEAR(q_series(0.5, 0.5, 1e-3).total / q_series(0.5, 1.0, 1e-3).total, 0.25, 1e-14);
    EXPECT_FALSE(q_series(0.5, 2.0, 1e-3).advisory.empty());
    EXPECT_THROW(q_series(2.0, 1.0, 0.1), DomainError);
    EXPECT_THROW(q_series(0.5, 0.0, 0.1), DomainError);
    EXPECT_THROW(q_series(0.5, 1.0, -0.1), DomainError);
}

TEST(Series, TermsOrderedByExponentAndSize) {
    for (double beta : {0.25, 0.4, 0.5, 2.0 / 3.0}) {
        for (double d : {0.1, 1e-3}) {
            const auto q = q_series(beta, 1.0, d);
            for (std::size_t i = 0; i < q.terms.size(); ++i) {
                EXPECT_LT(q.terms[i].exponent, 0.0);
                if (i == 0) continue;
                EXPECT_GT(q.terms[i].exponent, q.terms[i - 1].exponent);
                EXPECT_LT(std::abs(q.terms[i].value), std::abs(q.terms[i - 1].value)) << beta << " " << d << " " << i;
            }
        }
    }
}

TEST(Series, LastTermBlowsUpNearABorderline) {
    // Just below beta = 2/3 the l = 1 term carries Gamma(1/beta - 3/2), close to its pole.
    const auto q = q_series(2.0 / 3.0 - 1e-6, 1.0, 0.1);
    ASSERT_EQ(q.terms.size(), 2u);
    EXPECT_GT(std::abs(q.terms[1].value), 100.0 * std::abs(q.terms[0].value));
}

TEST(Series, LeadingTermMatchesDiscreteSum) {
    // For beta = 1/2 the discrete exponent is q + O(log 1/delta).
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    const auto pt = EdgePoint::from_delta(1e-2);
    const double g = g_sum(m, pt, turning_index(m, pt));
    EXPECT_NEAR(q_series(0.5, 1.0, 1e-2).total, 784.416, 1e-3);
    EXPECT_NEAR(g, 783.763, 1e-3);
}

TEST(ClosedForm, GammaIdentities) {
    // beta = 1: (pi/2) C0 E^{-1/2}; beta = 1/2: (pi/4) C0^2 E^{-3/2}.
    EXPECT_NEAR(continuum_g_closed_form(1.0, 2.0, 0.04), kPi / 2 * 2.0 / 0.2, 1e-12);
    EXPECT_NEAR(continuum_g_closed_form(0.5, 3.0, 0.25), kPi / 4 * 9.0 * 8.0, 1e-11);
    EXPECT_THROW(continuum_g_closed_form(2.0, 1.0, 0.1), DomainError);
}

TEST(Residual, DecreasingForHalfPower) {
    const auto t = g_minus_series_residual(0.5, 1.0, {1e-2, 1e-3}, 100'000'000, 2);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_TRUE(t.bounded);
    EXPECT_LT(t.rows[1].ratio, t.rows[0].ratio);
    EXPECT_TRUE(t.note.empty());
    EXPECT_DOUBLE_EQ(t.max_ratio, t.rows[0].ratio);
}

TEST(Residual, CapMovesGridToFloor) {
    const auto t = g_minus_series_residual(0.5, 1.0, {1e-2, 3e-4}, 1'000'000, 2);
    EXPECT_NEAR(t.delta_floor, 1e-3, 1e-15);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_TRUE(t.rows.back().capped);
    EXPECT_DOUBLE_EQ(t.rows.back().requested_delta, 3e-4);
    EXPECT_LE(t.rows.back().N, 1'000'000);
    EXPECT_FALSE(t.note.empty());
    // A capped point landing on an existing one is dropped but still noted.
    const auto d = g_minus_series_residual(0.5, 1.0, {1e-2, 1e-3, 1e-4}, 1'000'000, 2);
    EXPECT_EQ(d.rows.size(), 2u);
    EXPECT_FALSE(d.note.empty());
    EXPECT_THROW(g_minus_series_residual(0.5, 1.0, {1e-2}), DomainError);
}

TEST(SqrtDrop, ReferenceRatios) {
    // Reference values from 30-digit summation.
    const auto p = MonotoneF::power(1.0);
    EXPECT_NEAR(sqrt_drop_sum(p, 1000).ratio, 0.9945026314487015, 1e-11);
    EXPECT_NEAR(sqrt_drop_sum(p, 10000).ratio, 0.9681111403959659, 1e-11);
    const auto ll = MonotoneF::iterated_log(2);
    EXPECT_NEAR(sqrt_drop_sum(ll, 1000).ratio, 0.9141915062025618, 1e-11);
    EXPECT_NEAR(sqrt_drop_sum(ll, 10000).ratio, 0.9143720238340511, 1e-11);
}

TEST(SqrtDrop, LowerBoundAndTrend) {
    for (const auto& f : {MonotoneF::power(1.0), MonotoneF::power(0.5), MonotoneF::iterated_log(2)}) {
        const auto t = sqrt_drop_trend(f, {1000, 10000, 100000}, 2);
        EXPECT_TRUE(t.all_lower_bounds);
        EXPECT_TRUE(t.converging);
        EXPECT_LT(t.final_gap, t.first_gap);
    }
    EXPECT_THROW(sqrt_drop_sum(MonotoneF::power(1.0), 1), DomainError);
}

TEST(SqrtDrop, DeterministicAcrossThreads) {
    const auto f = MonotoneF::power(0.5);
    EXPECT_DOUBLE_EQ(sqrt_drop_sum(f, 50000, 1).S, sqrt_drop_sum(f, 50000, 8).S);
}

TEST(LogLaw, EdgeProfileAgainstReference) {
    // alpha = 1, delta = 0.15; reference from 30-digit summation.
    const auto rows = log_law_edge_profile(MonotoneF::power(1.0), {0.15}, 10'000'000, 2);
    ASSERT_EQ(rows.size(), 1u);
    const auto& r = rows[0];
    EXPECT_EQ(r.N, 227141);
    EXPECT_DOUBLE_EQ(r.N_formula, 227141.0);
    EXPECT_NEAR(r.g_direct, 23805.47140925604, 1e-6);
    EXPECT_NEAR(r.g_asymptotic, 21350.938329074525, 1e-7);
    EXPECT_NEAR(r.g_direct / r.g_asymptotic, 1.1149613680837187, 1e-10);
}

TEST(LogLaw, RatioTendsDownAndOverflowIsReported) {
    const auto rows = log_law_edge_profile(MonotoneF::power(1.0), {0.16, 0.15, 0.14, 0.135, 0.01}, 10'000'000, 2);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(rows[i].g_direct / rows[i].g_asymptotic, rows[i - 1].g_direct / rows[i - 1].g_asymptotic);
    EXPECT_FALSE(rows[4].error.empty());
    EXPECT_NE(rows[4].error.find("delta"), std::string::npos);
}
