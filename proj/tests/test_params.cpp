#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "edgeweight/params.hpp"

using namespace edgeweight;

TEST(MonotoneF, PowerFamilyValuesAndDerivatives) {
    const auto f = MonotoneF::power(1.5);
    EXPECT_DOUBLE_EQ(f.value(1.0), std::pow(2.0, -1.5));
    const double x = 2.3, h = 1e-5;
    EXPECT_NEAR(f.derivative(x), (f.value(x + h) - f.value(x - h)) / (2 * h), 1e-9);
    EXPECT_NEAR(f.second_derivative(x), (f.derivative(x + h) - f.derivative(x - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(f.inverse(f.value(7.0)), 7.0, 1e-12);
}

TEST(MonotoneF, DropIsAccurateForTinySteps) {
    const auto f = MonotoneF::power(1.0);
    // f(x) - f(x+h) = h / ((1+x)(1+x+h)) exactly.
    const double x = 20.0, h = 1e-9;
    EXPECT_NEAR(f.drop(x, h) / (h / ((1 + x) * (1 + x + h))), 1.0, 1e-12);
}

TEST(MonotoneF, IteratedLogKeepsLogsAboveOne) {
    for (int depth = 1; depth <= 3; ++depth) {
        const auto f = MonotoneF::iterated_log(depth);
        EXPECT_NEAR(f.value(std::log(2.0)), 1.0, 1e-12) << depth;
        const double x = 50.0, h = 1e-4;
        EXPECT_NEAR(f.derivative(x), (f.value(x + h) - f.value(x - h)) / (2 * h), 1e-9);
        EXPECT_LT(f.derivative(x), 0.0);
        EXPECT_GT(f.second_derivative(x), 0.0);
        EXPECT_NEAR(f.drop(x, 3.0), f.value(x) - f.value(x + 3.0), 1e-14);
    }
    EXPECT_THROW(MonotoneF::iterated_log(4), ConfigError);
}

TEST(MonotoneF, IteratedLogInverseOverflowsToInfinity) {
    const auto f = MonotoneF::iterated_log(2);
    EXPECT_TRUE(std::isinf(f.inverse(1e-3)));
    EXPECT_NEAR(f.value(f.inverse(0.6)), 0.6, 1e-12);
}

TEST(ParameterModel, PowerLawB) {
    const auto m = ParameterModel::power_law_b(1.0, 0.5);
    EXPECT_EQ(m.model_case(), ModelCase::b_case);
    EXPECT_DOUBLE_EQ(m.b(4), -0.5);
    EXPECT_DOUBLE_EQ(m.a(4), 1.0);
    // 101^{-1/2} - 102^{-1/2}, reference value from arbitrary-precision arithmetic.
    EXPECT_NEAR(m.b_increment(101), 4.889647233314864e-4, 1e-17);
    EXPECT_THROW(ParameterModel::power_law_b(1.0, 2.5), ConfigError);
    EXPECT_THROW(ParameterModel::power_law_b(-1.0, 0.5), ConfigError);
    EXPECT_THROW((void)m.b(0), DomainError);
}

TEST(ParameterModel, LogLawA) {
    const auto m = ParameterModel::log_law_a(MonotoneF::power(1.0));
    EXPECT_EQ(m.model_case(), ModelCase::a_case);
    // a_1 = 1 - 1/(1 + log 2).
    EXPECT_NEAR(m.a(1), 0.40938389085035875, 1e-15);
    EXPECT_DOUBLE_EQ(m.b(7), 0.0);
    EXPECT_NEAR(m.a_increment(10), m.a(11) - m.a(10), 1e-15);
    EXPECT_THROW(ParameterModel::log_law_a(MonotoneF::iterated_log(1)), ConfigError);
}

TEST(ParameterModel, CustomWithTails) {
    const auto c = ParameterModel::custom({}, {-1.0, -0.5, -0.25}, TailRule{TailRule::Kind::power_fit});
    EXPECT_EQ(c.model_case(), ModelCase::b_case);
    EXPECT_DOUBLE_EQ(c.b(2), -0.5);
    // Fit through (2, -0.5), (3, -0.25): exponent log 2 / log 1.5.
    const double p = std::log(2.0) / std::log(1.5);
    EXPECT_NEAR(c.b(6), -0.25 * std::pow(2.0, -p), 1e-15);

    const auto none = ParameterModel::custom({0.5, 0.7}, {}, TailRule{});
    EXPECT_EQ(none.model_case(), ModelCase::a_case);
    EXPECT_THROW((void)none.a(3), ModelError);
    EXPECT_THROW(ParameterModel::custom({-1.0}, {}, TailRule{}), ConfigError);
}

TEST(ParameterModel, FreeCase) {
    const auto f = ParameterModel::free_case();
    EXPECT_TRUE(f.is_free());
    EXPECT_DOUBLE_EQ(f.a(1000), 1.0);
    EXPECT_DOUBLE_EQ(f.b(1000), 0.0);
}

TEST(ParameterTable, MatchesModel) {
    const auto m = ParameterModel::log_law_a(MonotoneF::power(0.7));
    const ParameterTable t(m, 100);
    for (int n : {1, 17, 100}) {
        EXPECT_DOUBLE_EQ(t.a(n), m.a(n));
        EXPECT_DOUBLE_EQ(t.b(n), m.b(n));
    }
}

TEST(Validation, AcceptsMonotoneModels) {
    EXPECT_TRUE(validate_monotone(ParameterModel::power_law_b(0.8, 1.2), 5000).ok());
    const auto r = validate_monotone(ParameterModel::log_law_a(MonotoneF::power(1.0)), 5000);
    EXPECT_TRUE(r.ok());
    EXPECT_FALSE(r.note.empty());
}

TEST(Validation, RejectsNonMonotoneB) {
    const auto bad = ParameterModel::custom({}, {-1.0, -0.2, -0.5, -0.1, -0.05}, TailRule{TailRule::Kind::power_fit});
    const auto r = validate_monotone(bad, 20);
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.b_increasing);
    EXPECT_EQ(r.first_b_violation, 2);
}

TEST(Potential, PowerLawAndInverse) {
    const auto V = PotentialModel::shifted_power_law(1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(V.V(1.0), 0.5);
    EXPECT_DOUBLE_EQ(V.V0(), 1.0);
    // V = (x+1)^{-1}: V^{-1}(E) = 1/E - 1.
    EXPECT_NEAR(V.inverse(0.1), 9.0, 1e-12);
    EXPECT_NEAR(V.drop(3.0, 1e-10) / (1e-10 / (4.0 * (4.0 + 1e-10))), 1.0, 1e-12);
    EXPECT_TRUE(validate_potential(V).ok());
    EXPECT_DOUBLE_EQ(PotentialModel::power_law(1.0, 1.0).inverse(0.25), 4.0);
}

TEST(Potential, CustomInverseByBisection) {
    const auto V = PotentialModel::custom([](double x) { return std::exp(-x); }, [](double x) { return -std::exp(-x); });
    EXPECT_NEAR(V.inverse(0.1), std::log(10.0), 1e-12);
    EXPECT_EQ(V.inverse(2.0), 0.0);
}

TEST(Config, ParsesKeyValues) {
    std::istringstream in("# model\nkind = log-law-a\nfamily=power\nalpha = 0.5  # comment\n");
    const auto kv = parse_key_values(in);
    const auto m = model_from_config(kv);
    EXPECT_EQ(m.model_case(), ModelCase::a_case);
    EXPECT_NEAR(m.a(1), 1.0 - std::pow(1.0 + std::log(2.0), -0.5), 1e-15);
}

TEST(Config, IteratedLogDefaultsToPositiveA1) {
    std::istringstream in("kind=log-law-a\nfamily=iterated-log\ndepth=2\n");
    const auto m = model_from_config(parse_key_values(in));
    EXPECT_GT(m.a(1), 0.0);
}

TEST(Config, RejectsBadInput) {
    std::istringstream missing_eq("kind power-law-b\n");
    EXPECT_THROW(parse_key_values(missing_eq), ConfigError);
    std::istringstream bad_kind("kind=spiral\n");
    EXPECT_THROW(model_from_config(parse_key_values(bad_kind)), ConfigError);
    std::istringstream bad_num("kind=power-law-b\nC=abc\n");
    EXPECT_THROW(model_from_config(parse_key_values(bad_num)), ConfigError);
    EXPECT_THROW(parse_key_values_file("/nonexistent/model.cfg"), ConfigError);
}

TEST(Config, CustomListsAndPotential) {
    std::istringstream in("kind=custom\nb=-1,-0.5,-0.25\ntail=power-fit\n");
    const auto m = model_from_config(parse_key_values(in));
    EXPECT_DOUBLE_EQ(m.b(3), -0.25);
    std::istringstream pin("C0=2\nbeta=0.5\nx0=1\n");
    const auto V = potential_from_config(parse_key_values(pin));
    EXPECT_DOUBLE_EQ(V.V(3.0), 1.0);
}
