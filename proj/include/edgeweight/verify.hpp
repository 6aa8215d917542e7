#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edgeweight/asymptotics.hpp"
#include "edgeweight/continuum.hpp"
#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"
#include "edgeweight/recurrence.hpp"
#include "edgeweight/transfer.hpp"
#include "edgeweight/wkb.hpp"

namespace edgeweight {

// Aggregated outcome of one inequality over many instances.
struct CheckResult {
    std::string name;
    std::int64_t instances = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = true;

    void record(double violation) {
        ++instances;
        if (std::isnan(violation)) violation = kInf;
        max_violation = std::max(max_violation, violation);
        pass = max_violation <= tolerance;
    }
    void merge(const CheckResult& o) {
        instances += o.instances;
        max_violation = std::max(max_violation, o.max_violation);
        pass = max_violation <= tolerance;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 20240611;
    bool quick = false;
    bool perturb_monotonicity = false;  // negative control: break b_n monotonicity
    unsigned threads = 0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    [[nodiscard]] bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
    [[nodiscard]] const CheckResult& find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw DomainError("no check named " + name);
    }
};

inline constexpr double kLemmaTolerance = 1e-10;
inline constexpr double kChainTolerance = 1e-10;
inline constexpr double kPhiTolerance = 1e-12;

// A model, an edge point, and the hyperbolic range 1..N used by the checks.
struct DiscreteInstance {
    ParameterModel model;
    EdgePoint point;
    std::int64_t N = 0;
};

// Random b-case instance with C in (0, 1], beta in (0.2, 1.9) and N near a
// log-uniform target in [5, N_max].
inline DiscreteInstance random_b_instance(std::mt19937_64& rng, std::int64_t N_max = 10'000) {
    std::uniform_real_distribution<double> uC(0.0, 1.0), uB(0.2, 1.9), uL(std::log(5.5), std::log(N_max - 0.5));
    for (;;) {
        const double C = std::max(1e-3, 1.0 - uC(rng));
        const double beta = uB(rng);
        const double Nt = std::exp(uL(rng));
        const double delta = C * std::pow(Nt, -beta);
        if (!(delta > 0.0 && delta < 2.0)) continue;
        auto model = ParameterModel::power_law_b(C, beta);
        const auto pt = EdgePoint::from_delta(delta);
        const auto N = turning_index(model, pt);
        if (N >= 5 && N <= N_max) return {model, pt, N};
    }
}

// Random a-case instance: a_n = 1 - f(log(n+1)) with f = (1+x)^{-alpha}, x of either sign.
inline DiscreteInstance random_a_instance(std::mt19937_64& rng, std::int64_t N_max = 10'000) {
    std::uniform_real_distribution<double> uA(0.5, 2.0), uL(std::log(5.5), std::log(N_max - 0.5)), uS(0.0, 1.0);
    for (;;) {
        const double alpha = uA(rng);
        const double Nt = std::exp(uL(rng));
        const int sign = uS(rng) < 0.5 ? -1 : 1;
        const auto f = MonotoneF::power(alpha);
        const double delta = 2.0 * f.value(std::log(Nt + 1.5));
        if (!(delta > 0.0 && delta < 2.0)) continue;
        auto model = ParameterModel::log_law_a(f);
        const auto pt = EdgePoint::from_delta(delta, sign);
        const auto N = turning_index(model, pt);
        if (N >= 5 && N <= N_max) return {model, pt, N};
    }
}

// b-case copy of a power-law model with b_k pushed down by 1/2 at k = N/2, which
// breaks monotonicity inside the hyperbolic range.
inline ParameterModel perturbed_copy(const ParameterModel& model, std::int64_t N) {
    std::vector<double> b(static_cast<std::size_t>(N + 2));
    for (std::int64_t n = 1; n <= N + 2; ++n) b[n - 1] = model.b(n);
    b[static_cast<std::size_t>(std::max<std::int64_t>(2, N / 2)) - 1] -= 0.5;
    return ParameterModel::custom({}, std::move(b), TailRule{TailRule::Kind::power_fit});
}

struct HyperbolicChecks {
    CheckResult psi_nondecreasing{"psi_nondecreasing", 0, 0.0, kLemmaTolerance};
    CheckResult psi_linear_growth{"psi_linear_growth", 0, 0.0, kLemmaTolerance};
    CheckResult w_bound{"W_bound", 0, 0.0, kLemmaTolerance};
    CheckResult sandwich{"hyperbolic_sandwich", 0, 0.0, kLemmaTolerance};
};

// psi_{n+1} >= psi_n >= 1, psi_{n+1} <= 1 + psi_n and psi_n <= n + 1,
// W_n <= e^{gamma_{n+1}}, and e^{2 S_n} <= p_n^2 + a_n^2 p_{n-1}^2 <= 2 (n+1)^2 e^{2 S_n}
// with S_n = sum_{j<=n} gamma_j, for 1 <= n < N. Violations are relative.
inline HyperbolicChecks hyperbolic_checks(const ParameterModel& model, const EdgePoint& pt, std::int64_t N) {
    HyperbolicChecks out;
    const auto ps = psi_sequence(model, pt, N);
    double worst_nd = 0.0, worst_lg = 0.0, worst_w = 0.0, worst_sw = 0.0;
    for (std::int64_t n = 0; n < N; ++n) {
        const double p0 = ps.psi[n], p1 = ps.psi[n + 1];
        worst_nd = std::max({worst_nd, (p0 - p1) / p0, 1.0 - p0});
        if (n + 2 <= N) worst_lg = std::max(worst_lg, (p1 - 1.0 - p0) / (1.0 + p0));
        worst_lg = std::max(worst_lg, (p0 - static_cast<double>(n + 1)) / static_cast<double>(n + 1));
        const double eg = std::exp(ps.gamma[n + 1]);
        worst_w = std::max(worst_w, (ps.W[n] - eg) / eg);
    }
    const double x = model.model_case() == ModelCase::a_case ? std::abs(pt.x) : pt.x;
    LogScaledPair s;
    NeumaierSum S;
    for (std::int64_t n = 1; n < N; ++n) {
        s = step_p(model, x, s);
        S.add(ps.gamma[n]);
        const double an = model.a(n);
        const double lv = 2.0 * s.log_scale() + std::log(s.u0 * s.u0 + an * an * s.u1 * s.u1);
        const double lo = 2.0 * S.value();
        const double hi = lo + std::log(2.0) + 2.0 * std::log(static_cast<double>(n + 1));
        worst_sw = std::max({worst_sw, std::expm1(lo - lv), std::expm1(lv - hi)});
    }
    out.psi_nondecreasing.record(std::max(0.0, worst_nd));
    out.psi_linear_growth.record(std::max(0.0, worst_lg));
    out.w_bound.record(std::max(0.0, worst_w));
    out.sandwich.record(std::max(0.0, worst_sw));
    return out;
}

struct EllipticChecks {
    CheckResult direct_le_product{"transfer_direct_le_product", 0, 0.0, kChainTolerance};
    CheckResult product_le_closed{"transfer_product_le_closed", 0, 0.0, kChainTolerance};
    CheckResult unit_determinant{"transfer_unit_determinant", 0, 0.0, 1e-6};
    CheckResult phi_ratio{"phi_ratio_bounds", 0, 0.0, kPhiTolerance};
};

// Elliptic side from N+1 to N+1+span: pointwise log-norm chain and the
// per-step ratio bounds of the phase variable.
inline EllipticChecks elliptic_checks(const ParameterModel& model, const EdgePoint& pt, std::int64_t N,
                                      std::int64_t span) {
    EllipticChecks out;
    const auto chain = transfer_chain(model, pt, N + 1, N + 1 + span);
    out.direct_le_product.record(std::max(0.0, chain.max_direct_over_product));
    out.product_le_closed.record(std::max(0.0, chain.max_product_over_closed));
    out.unit_determinant.record(chain.max_abs_log_det);
    const auto phi = phi_trajectory(model, pt, N + 1, N + 1 + span);
    out.phi_ratio.record(phi.max_violation);
    return out;
}

struct ContinuumInstance {
    PotentialModel V;
    double E = 0.0;
};

// V = C0 (x + x0)^{-beta} with C0 in [0.5, 4], beta in (0.2, 1.9), x0 in [1, 3],
// and E = V(N_t) for a target turning point N_t in [1.5, 30].
inline ContinuumInstance random_continuum_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uC(0.5, 4.0), uB(0.2, 1.9), uX(1.0, 3.0), uN(std::log(1.5), std::log(30.0));
    const double C0 = uC(rng), beta = uB(rng), x0 = uX(rng);
    auto V = PotentialModel::shifted_power_law(C0, beta, x0);
    const double Nt = std::exp(uN(rng));
    return {V, V.V(Nt)};
}

struct ContinuumChecks {
    CheckResult monotonicity{"continuum_monotonicity", 0, 0.0, kContinuumTolerance};
    CheckResult sandwich{"continuum_sandwich", 0, 0.0, kContinuumTolerance};
    CheckResult modulus_integral{"modulus_integral_closed_form", 0, 0.0, 1e-8};
    CheckResult fundamental{"fundamental_matrix_bound", 0, 0.0, kContinuumTolerance};
};

inline ContinuumChecks continuum_checks(const ContinuumInstance& inst, double y_max) {
    ContinuumChecks out;
    const double N = inst.V.inverse(inst.E);
    const auto tr = shoot(inst.V, inst.E, N + 2.0);
    const auto rep = monotone_checks(inst.V, inst.E, tr);
    double worst = 0.0;
    for (const auto& c : rep.checks) {
        if (c.name == "sandwich at N")
            out.sandwich.record(c.max_violation);
        else
            worst = std::max(worst, c.max_violation);
    }
    out.monotonicity.record(worst);
    const double x_from = N + 1.0;
    const auto mb = modulus_bound(inst.V, inst.E, x_from);
    out.modulus_integral.record(std::abs(mb.integral_quadrature - mb.integral_closed));
    const auto mf = modulus_bound(inst.V, inst.E, x_from, x_from + y_max);
    out.modulus_integral.record(std::abs(mf.integral_quadrature - mf.integral_closed));
    std::vector<double> ys;
    for (double d : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0})
        if (d <= y_max) ys.push_back(x_from + d);
    const auto fc = fundamental_matrix_check(inst.V, inst.E, x_from, ys);
    out.fundamental.record(std::max(0.0, fc.max_log_norm - fc.log_bound));
    return out;
}

// (2l + 1) c_l = binom(-1/2, l) 4^{-l}, with the binomial built independently.
inline CheckResult coefficient_identity_check(int L = 64) {
    CheckResult c{"coefficient_identity", 0, 0.0, 0.0};
    const auto t = arccosh_coeffs(L);
    Rational binom(1);
    Rational quarter_pow(1);
    for (int l = 0; l <= L; ++l) {
        if (l > 0) {
            binom *= Rational(-1 - 2 * (l - 1), 2 * l);  // (-1/2 - (l-1)) / l
            quarter_pow /= 4;
        }
        c.record(t.c[l] * (2 * l + 1) == binom * quarter_pow ? 0.0 : 1.0);
    }
    return c;
}

// Finite-N lower bound of the square-root drop sum for the three reference families.
inline CheckResult sqrt_drop_lower_bound_check(const std::vector<std::int64_t>& Ns, unsigned threads = 0) {
    CheckResult c{"sqrt_drop_lower_bound", 0, 0.0, 0.0};
    for (const auto& f : {MonotoneF::power(1.0), MonotoneF::power(0.5), MonotoneF::iterated_log(2)})
        for (auto N : Ns) {
            const auto r = sqrt_drop_sum(f, N, threads);
            c.record(r.lower_bound_holds ? 0.0 : (r.lower_bound - r.S) / r.lower_bound);
        }
    return c;
}

// Lower edge: direct ||T_n|| from index 1 stays below the constant K.
inline CheckResult lower_edge_check(std::mt19937_64& rng, int instances, std::int64_t span) {
    CheckResult c{"lower_edge_transfer_bound", 0, 0.0, kChainTolerance};
    std::uniform_real_distribution<double> uC(0.05, 1.0), uB(0.2, 1.9), uX(-1.99, -0.5);
    for (int i = 0; i < instances; ++i) {
        const auto model = ParameterModel::power_law_b(uC(rng), uB(rng));
        const double x = uX(rng);
        if (!(x - model.b(1) > -2.0)) continue;
        const auto env = lower_edge_envelope(model, x);
        ScaledMat2 T;
        double worst = -kInf;
        for (std::int64_t n = 2; n <= span; ++n) {
            T.left_multiply(step_matrix_real(model, x, n));
            worst = std::max(worst, T.log_norm() - env.log_K);
        }
        c.record(std::max(0.0, worst));
    }
    return c;
}

// Runs every property suite. Instance counts: 200 b-case and 100 a-case
// hyperbolic instances, 50 elliptic chains of length 10^4, 20 continuum
// potentials (reduced with quick).
inline VerifyReport run_verify(const VerifyOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    const int nb = opt.quick ? 20 : 200, na = opt.quick ? 10 : 100;
    const int nt = opt.quick ? 10 : 50, nc = opt.quick ? 5 : 20;
    const std::int64_t span = opt.quick ? 1'000 : 10'000;
    const double y_max = opt.quick ? 100.0 : 1000.0;

    std::vector<DiscreteInstance> hyper;
    for (int i = 0; i < nb; ++i) hyper.push_back(random_b_instance(rng));
    for (int i = 0; i < na; ++i) hyper.push_back(random_a_instance(rng));
    if (opt.perturb_monotonicity)
        for (int i = 0; i < nb; ++i) hyper[i].model = perturbed_copy(hyper[i].model, hyper[i].N);
    std::vector<DiscreteInstance> ell;
    for (int i = 0; i < nt; ++i) ell.push_back(i % 2 == 0 ? random_b_instance(rng) : random_a_instance(rng));
    std::vector<ContinuumInstance> cont;
    for (int i = 0; i < nc; ++i) cont.push_back(random_continuum_instance(rng));

    std::vector<HyperbolicChecks> hres(hyper.size());
    parallel_for(hyper.size(), [&](std::size_t i) { hres[i] = hyperbolic_checks(hyper[i].model, hyper[i].point, hyper[i].N); },
                 opt.threads);
    std::vector<EllipticChecks> eres(ell.size());
    parallel_for(ell.size(), [&](std::size_t i) { eres[i] = elliptic_checks(ell[i].model, ell[i].point, ell[i].N, span); },
                 opt.threads);
    std::vector<ContinuumChecks> cres(cont.size());
    parallel_for(cont.size(), [&](std::size_t i) { cres[i] = continuum_checks(cont[i], y_max); }, opt.threads);

    HyperbolicChecks h;
    for (const auto& r : hres) {
        h.psi_nondecreasing.merge(r.psi_nondecreasing);
        h.psi_linear_growth.merge(r.psi_linear_growth);
        h.w_bound.merge(r.w_bound);
        h.sandwich.merge(r.sandwich);
    }
    EllipticChecks e;
    for (const auto& r : eres) {
        e.direct_le_product.merge(r.direct_le_product);
        e.product_le_closed.merge(r.product_le_closed);
        e.unit_determinant.merge(r.unit_determinant);
        e.phi_ratio.merge(r.phi_ratio);
    }
    ContinuumChecks c;
    for (const auto& r : cres) {
        c.monotonicity.merge(r.monotonicity);
        c.sandwich.merge(r.sandwich);
        c.modulus_integral.merge(r.modulus_integral);
        c.fundamental.merge(r.fundamental);
    }
    VerifyReport rep;
    rep.checks = {h.psi_nondecreasing, h.psi_linear_growth, h.w_bound,        h.sandwich,
                  e.direct_le_product, e.product_le_closed, e.unit_determinant, e.phi_ratio,
                  c.monotonicity,      c.sandwich,          c.modulus_integral, c.fundamental};
    rep.checks.push_back(lower_edge_check(rng, opt.quick ? 5 : 20, opt.quick ? 1'000 : 10'000));
    rep.checks.push_back(coefficient_identity_check(64));
    const std::vector<std::int64_t> Ns =
        opt.quick ? std::vector<std::int64_t>{1'000, 10'000} : std::vector<std::int64_t>{1'000, 10'000, 100'000};
    rep.checks.push_back(sqrt_drop_lower_bound_check(Ns, opt.threads));
    return rep;
}

}  // namespace edgeweight
