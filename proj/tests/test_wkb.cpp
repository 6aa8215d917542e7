#include <cmath>

#include <gtest/gtest.h>

#include "edgeweight/asymptotics.hpp"
#include "edgeweight/wkb.hpp"

using namespace edgeweight;

TEST(Phase, ExcessGammaKappa) {
    EXPECT_NEAR(acosh1p(1e-12), std::sqrt(2e-12), 1e-18);
    EXPECT_NEAR(acosh1p(0.5), std::acosh(1.5), 1e-15);
    EXPECT_NEAR(acos_deficit(0.5), std::acos(0.75), 1e-15);
    EXPECT_NEAR(e_of_y(1.0), 1.0 / std::sin(1.0) - 1.0, 1e-15);
    EXPECT_NEAR(e_of_y(1e-5), 1.0 / std::sin(1e-5) - 1e5, 1e-9);
    EXPECT_THROW(gamma_from_excess(-0.1), DomainError);
    EXPECT_THROW(kappa_from_excess(0.1), DomainError);
}

TEST(TurningIndex, PowerLawB) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    // n^{-1/2} >= delta  <=>  n <= delta^{-2}.
    EXPECT_EQ(turning_index(m, EdgePoint::from_delta(0.1)), 100);
    EXPECT_EQ(turning_index(m, EdgePoint::from_delta(0.02)), 2500);
    // 2 - 1.9 rounds just above 0.1.
    EXPECT_EQ(turning_index(m, EdgePoint::at(1.9)), 99);
    EXPECT_EQ(turning_index(m, EdgePoint::from_delta(1.5)), 0);
    EXPECT_EQ(turning_index(m, EdgePoint::at(-1.0)), 0);
}

TEST(TurningIndex, LogLawAMatchesBruteForce) {
    const auto m = ParameterModel::log_law_a(MonotoneF::power(1.0));
    const std::pair<double, std::int64_t> cases[] = {{1.5, 19}, {1.6, 53}, {1.7, 288}};
    for (auto [x, N] : cases) {
        EXPECT_EQ(turning_index(m, EdgePoint::at(x)), N) << x;
        EXPECT_EQ(turning_index(m, EdgePoint::at(-x)), N) << x;
    }
}

TEST(TurningIndex, GenericSearchAgreesWithScan) {
    const auto m = ParameterModel::custom({}, {-1.0, -0.6, -0.3, -0.2, -0.11, -0.05}, TailRule{TailRule::Kind::power_fit});
    const auto pt = EdgePoint::from_delta(0.1);
    std::int64_t scan = 0;
    for (std::int64_t n = 1; n < 1000; ++n)
        if (-m.b(n) >= 0.1) scan = n;
    EXPECT_EQ(turning_index(m, pt), scan);
}

TEST(GSum, MatchesArccoshSum) {
    const auto b = ParameterModel::power_law_b(0.9, 1.1);
    const auto pt = EdgePoint::from_delta(0.003);
    const auto N = turning_index(b, pt);
    double ref = 0;
    for (std::int64_t n = 1; n <= N; ++n) ref += std::acosh((pt.x + 0.9 * std::pow(double(n), -1.1)) / 2.0);
    EXPECT_NEAR(g_sum(b, pt, N) / ref, 1.0, 1e-11);
    EXPECT_DOUBLE_EQ(g_sum(b, pt, N, 1), g_sum(b, pt, N, 4));

    // a-case alpha = 1 at x = 1.6, reference from 30-digit arithmetic.
    const auto a = ParameterModel::log_law_a(MonotoneF::power(1.0));
    EXPECT_NEAR(g_sum(a, EdgePoint::at(1.6), 53), 18.077075521934809951952474714, 1e-11);
}

TEST(GContinuum, ShiftedAndUnshiftedPowerLaws) {
    // Reference values from 30-digit quadrature.
    EXPECT_NEAR(g_continuum(PotentialModel::shifted_power_law(1.0, 1.0, 1.0), 0.1), 3.00114624453224428699, 1e-11);
    EXPECT_NEAR(g_continuum(PotentialModel::power_law(2.0, 0.5), 0.05), 280.992589241629055726, 1e-8);
    EXPECT_NEAR(g_continuum(PotentialModel::power_law(2.0, 0.5), 0.05), continuum_g_closed_form(0.5, 2.0, 0.05), 1e-8);
    EXPECT_EQ(g_continuum(PotentialModel::shifted_power_law(1.0, 1.0, 1.0), 2.0), 0.0);
}

TEST(Envelope, DiscreteStructure) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    const auto pt = EdgePoint::from_delta(0.02);
    const auto e = h_envelope(m, pt);
    EXPECT_EQ(e.N, 2500);
    EXPECT_EQ(e.m, 2499);
    EXPECT_EQ(e.ell, 2502);
    EXPECT_NEAR(e.increment, std::pow(2501.0, -0.5) - std::pow(2502.0, -0.5), 1e-16);
    EXPECT_TRUE(std::isfinite(e.h));
    EXPECT_GT(e.h, 0.0);
    EXPECT_DOUBLE_EQ(e.reported(), e.h);
    // The theorem-shaped value dominates the direct chain value.
    EXPECT_GE(e.h, e.h_exact - 1e-9);
    EXPECT_NEAR(e.L_total, e.log_H + e.log_K - e.log_a_ell, 1e-14);
}

TEST(Envelope, NoHyperbolicRegionReportsChainValue) {
    const auto m = ParameterModel::power_law_b(0.5, 0.5);
    const auto e = h_envelope(m, EdgePoint::from_delta(1.0));
    EXPECT_EQ(e.N, 0);
    EXPECT_TRUE(std::isinf(e.h));
    EXPECT_DOUBLE_EQ(e.reported(), e.h_exact);
    EXPECT_THROW(h_envelope(m, EdgePoint::at(-1.0)), DomainError);
}

TEST(Envelope, ACaseIsFinite) {
    const auto m = ParameterModel::log_law_a(MonotoneF::power(1.0));
    for (double x : {1.5, -1.7}) {
        const auto e = h_envelope(m, EdgePoint::at(x));
        EXPECT_TRUE(std::isfinite(e.h)) << x;
        EXPECT_GE(e.h, e.h_exact - 1e-9) << x;
    }
}

TEST(Envelope, ContinuumEqualsChainValue) {
    const auto V = PotentialModel::shifted_power_law(1.0, 1.0, 1.0);
    for (double E : {0.05, 0.1, 0.2}) {
        const auto c = h_envelope_continuum(V, E);
        EXPECT_NEAR(c.N, 1.0 / E - 1.0, 1e-10);
        const double lead = std::max(0.5 * std::log(kPi * (c.N * c.N + 1.0)), c.gamma0 - 0.5 * std::log(kPi));
        EXPECT_NEAR(c.h, c.log_hop + c.log_tail + lead, 1e-12) << E;
    }
    EXPECT_THROW(h_envelope_continuum(V, 0.9), DomainError);  // N(E) < 1
    EXPECT_THROW(h_envelope_continuum(PotentialModel::power_law(1.0, 1.0), 0.1), DomainError);
}

TEST(EdgeProfileRow, AcceptanceRule) {
    EdgeProfile r;
    r.g = 10.0;
    r.h = 1.0;
    r.log_w_carmona = -21.0;
    EXPECT_TRUE(r.acceptance());
    r.log_w_carmona = -23.0;
    EXPECT_FALSE(r.acceptance());
    r.log_w_carmona = kNaN;
    EXPECT_FALSE(r.acceptance());
}
