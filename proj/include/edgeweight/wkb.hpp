#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"
#include "edgeweight/quadrature.hpp"

namespace edgeweight {

// Largest index handled by turning-point searches (doubles represent every
// integer below it).
inline constexpr std::int64_t kMaxTurningIndex = std::int64_t{1} << 53;

struct TurningData {
    ParameterModel model;
    EdgePoint point;
    std::int64_t N = 0;   // last hyperbolic index, 0 if none
    bool capped = false;  // N hit kMaxTurningIndex
    double kappa_inf = 0.0;
    double delta = 0.0;

    // gamma_n for 1 <= n <= N.
    [[nodiscard]] double gamma(std::int64_t n) const {
        if (n < 1 || n > N) throw DomainError("gamma_n outside 1..N");
        return gamma_n(model, point, n);
    }
    // kappa_n for n > N.
    [[nodiscard]] double kappa(std::int64_t n) const {
        if (n <= N) throw DomainError("kappa_n needs n > N");
        return kappa_n(model, point, n);
    }
};

// Turning index N(x): the largest n with x - b_n >= 2 (b-case) or
// |x|/a_n >= 2 (a-case); the tie belongs to the hyperbolic side.
inline std::int64_t turning_index(const ParameterModel& model, const EdgePoint& pt, bool* capped = nullptr) {
    auto hyper = [&](std::int64_t n) { return excess(model, pt, n) >= 0.0; };
    if (capped) *capped = false;
    if (!hyper(1)) return 0;
    std::int64_t cand = 1;
    bool have_candidate = false;
    if (model.kind() == ParameterModel::Kind::power_law_b && pt.x > 0.0) {
        const double c = std::pow(model.C() / pt.delta, 1.0 / model.beta());
        cand = c >= static_cast<double>(kMaxTurningIndex) ? kMaxTurningIndex
                                                          : std::max<std::int64_t>(1, static_cast<std::int64_t>(c));
        have_candidate = true;
    } else if (model.kind() == ParameterModel::Kind::log_law_a) {
        const double y = model.f()->inverse(0.5 * pt.delta);
        const double c = std::exp(y);
        cand = !(c < static_cast<double>(kMaxTurningIndex)) ? kMaxTurningIndex
                                                            : std::max<std::int64_t>(1, static_cast<std::int64_t>(c) - 1);
        have_candidate = true;
    }
    if (have_candidate) {
        while (cand > 1 && !hyper(cand)) --cand;
        while (cand < kMaxTurningIndex && hyper(cand + 1)) ++cand;
        if (cand >= kMaxTurningIndex && capped) *capped = true;
        return cand;
    }
    // Monotone excess: exponential bracket, then bisection.
    std::int64_t lo = 1, hi = 2;
    while (hyper(hi)) {
        lo = hi;
        if (hi >= kMaxTurningIndex / 2) {
            if (capped) *capped = true;
            return kMaxTurningIndex;
        }
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (hyper(mid) ? lo : hi) = mid;
    }
    return lo;
}

// Turning data with N >= 1; a point without a hyperbolic region is a DomainError
// (callers take the elliptic-only path instead).
inline TurningData turning_point(const ParameterModel& model, const EdgePoint& pt) {
    TurningData t{model, pt};
    t.N = turning_index(model, pt, &t.capped);
    t.delta = pt.delta;
    t.kappa_inf = kappa_infinity(pt);
    if (t.N == 0) throw DomainError("no hyperbolic region at x=" + std::to_string(pt.x));
    return t;
}

// g = sum_{j=1}^{N} gamma_j, summed in deterministic compensated chunks.
inline double g_sum(const ParameterModel& model, const EdgePoint& pt, std::int64_t N, unsigned threads = 0) {
    if (N <= 0) return 0.0;
    return chunked_sum(
        1, static_cast<std::uint64_t>(N),
        [&](std::uint64_t j) { return gamma_from_excess(std::max(0.0, excess(model, pt, static_cast<std::int64_t>(j)))); },
        threads);
}

inline double g_sum(const TurningData& t, unsigned threads = 0) { return g_sum(t.model, t.point, t.N, threads); }

// Continuum exponent g(E) = int_0^{N(E)} sqrt(V(x) - E) dx by double-exponential
// quadrature (square-root zero at N(E), possible algebraic singularity at 0).
inline double g_continuum(const PotentialModel& V, double E, double rel_tol = 1e-12) {
    const double N = V.inverse(E);
    if (!(N > 0.0)) return 0.0;
    const auto r = quad::tanh_sinh(
        [&](double x, double, double dr) { return std::sqrt(std::max(0.0, V.drop(x, dr))); }, 0.0, N, rel_tol, 9);
    return r.value;
}

// Ingredients of the error envelope h for the discrete theorems.
struct EnvelopeParts {
    std::int64_t N = 0;
    std::int64_t m = 0;      // index where the hyperbolic sandwich is applied, max(N-1, 0)
    std::int64_t ell = 0;    // start of the elliptic transfer chain, N+2
    double gamma_N = 0.0;    // g minus the sum up to m
    double log_H = 0.0;      // log of the product bound for the hop m -> ell
    double log_K = 0.0;      // log of the elliptic transfer-matrix bound from ell
    double log_a_ell = 0.0;
    double kappa_ell = 0.0;
    double kappa_inf = 0.0;
    double L_total = 0.0;    // log H + log K - log a_ell
    double h_exact = 0.0;    // sharpest envelope from the chain
    double increment = 0.0;  // b_{N+2}-b_{N+1} or a_{N+2}-a_{N+1}
    double log_C_env = kInf; // theorem-shaped constant
    double h = kInf;         // log(C_env N increment^{-1} delta^{1/2}) (b) / log(C_env N increment^{-1}) (a)

    // The value to report: theorem-shaped when defined, otherwise the chain value
    // (no hyperbolic region).
    [[nodiscard]] double reported() const { return N >= 1 ? h : h_exact; }
};

inline EnvelopeParts h_envelope(const ParameterModel& model, const EdgePoint& pt) {
    const bool a_case = model.model_case() == ModelCase::a_case;
    if (!a_case && !(pt.x > 0.0 && pt.x < 2.0)) throw DomainError("b-case envelope needs x in (0, 2)");
    if (a_case && !(pt.x != 0.0 && std::abs(pt.x) < 2.0)) throw DomainError("a-case envelope needs 0 < |x| < 2");
    EnvelopeParts e;
    bool capped = false;
    e.N = turning_index(model, pt, &capped);
    if (capped) throw DomainError("turning index exceeds 2^53; envelope not computable");
    e.m = std::max<std::int64_t>(e.N - 1, 0);
    e.ell = e.N + 2;
    e.gamma_N = e.N >= 1 ? gamma_n(model, pt, e.N) : 0.0;
    const double ax = std::abs(pt.x);
    NeumaierSum lh;
    for (std::int64_t k = e.m + 1; k <= e.ell; ++k)
        lh.add(std::log((1.0 + ax + std::abs(model.b(k))) / model.a(k)));
    e.log_H = lh.value();
    const double e_ell = excess(model, pt, e.ell);
    e.kappa_ell = kappa_from_excess(e_ell);
    e.kappa_inf = kappa_infinity(pt);
    const double a_ell = model.a(e.ell);
    e.log_a_ell = std::log(a_ell);
    const double chain = std::log(e.kappa_inf / e.kappa_ell);
    if (!a_case)
        e.log_K = kLn2 - std::log(std::sin(e.kappa_ell)) + chain + e.kappa_inf * e_of_y(e.kappa_inf);
    else
        e.log_K = kLn2 - e.log_a_ell - std::log(std::sin(e.kappa_ell)) + chain +
                  2.0 * e.kappa_inf * e_of_y(2.0 * e.kappa_inf);
    e.L_total = e.log_H + e.log_K - e.log_a_ell;
    e.h_exact = e.L_total + 0.5 * std::log(kPi) + std::log(std::sqrt(2.0) * static_cast<double>(e.m + 1)) + e.gamma_N;
    if (e.N < 1) return e;

    // rho = (kappa/sin kappa) * (2(1 - cos kappa)/kappa^2), with 2(1 - cos kappa_ell) = -e_ell.
    const double log_rho = std::log(e.kappa_ell / std::sin(e.kappa_ell)) + std::log(-e_ell) - 2.0 * std::log(e.kappa_ell);
    const double logN = std::log(static_cast<double>(e.N));
    if (!a_case) {
        e.increment = model.b_increment(e.N + 1);
        e.log_C_env = std::log(2.0 * std::sqrt(2.0 * kPi)) + log_rho + std::log(e.kappa_inf / std::sqrt(pt.delta)) +
                      e.kappa_inf * e_of_y(e.kappa_inf) + e.log_H - e.log_a_ell + e.gamma_N;
        e.h = e.increment > 0.0 ? e.log_C_env + logN - std::log(e.increment) + 0.5 * std::log(pt.delta) : kInf;
    } else {
        e.increment = model.a_increment(e.N + 1);
        e.log_C_env = 0.5 * std::log(2.0 * kPi) + log_rho + std::log(e.kappa_inf) +
                      2.0 * e.kappa_inf * e_of_y(2.0 * e.kappa_inf) + e.log_H - 2.0 * e.log_a_ell + e.gamma_N;
        e.h = e.increment > 0.0 ? e.log_C_env + logN - std::log(e.increment) : kInf;
    }
    return e;
}

// Continuum analog: sandwich at N(E), a unit hop to N(E)+1, then the
// modulus-variable bound. Requires V(0) finite and N(E) >= 1.
struct ContinuumEnvelope {
    double N = 0.0;
    double gamma0 = 0.0;     // sqrt(V(0) - E)
    double kappa_inf = 0.0;  // sqrt(E)
    double kappa_from = 0.0; // kappa(N+1) = sqrt(V(N) - V(N+1))
    double dV = 0.0;         // V(N) - V(N+1)
    double log_hop = 0.0;    // 1 + E + V(0)
    double log_tail = 0.0;   // log of 2 max(1,k_inf) k_inf / (k_from min(1,k_from))
    double log_C_env = 0.0;
    double h = 0.0;          // log(C_env N dV^{-1} E^{1/2}); equals the chain value
};

inline ContinuumEnvelope h_envelope_continuum(const PotentialModel& V, double E) {
    const double V0 = V.V0();
    if (!std::isfinite(V0)) throw DomainError("continuum envelope needs V(0) finite");
    if (!(E > 0.0 && E < V0)) throw DomainError("continuum envelope needs 0 < E < V(0)");
    ContinuumEnvelope c;
    c.N = V.inverse(E);
    if (!(c.N >= 1.0)) throw DomainError("continuum envelope needs N(E) >= 1");
    c.gamma0 = std::sqrt(V0 - E);
    c.kappa_inf = std::sqrt(E);
    c.dV = V.drop(c.N, 1.0);
    c.kappa_from = std::sqrt(c.dV);
    c.log_hop = 1.0 + E + V0;
    c.log_tail = std::log(2.0 * std::max(1.0, c.kappa_inf) * c.kappa_inf /
                          (c.kappa_from * std::min(1.0, c.kappa_from)));
    const double sp = std::sqrt(kPi);
    const double lead = std::max(sp * std::sqrt(c.N * c.N + 1.0) / c.N, std::exp(c.gamma0) / (sp * c.N));
    c.log_C_env = kLn2 + c.log_hop + std::log(std::max(1.0, c.kappa_inf)) + std::log(std::max(1.0, c.kappa_from)) +
                  std::log(lead);
    c.h = c.log_C_env + std::log(c.N) - std::log(c.dV) + 0.5 * std::log(E);
    return c;
}

// One row of an edge sweep.
struct EdgeProfile {
    std::string kind = "discrete";  // discrete | continuum | lower-edge
    double x = kNaN;                // x, or E for continuum rows
    double delta = kNaN;            // 2 - |x|, or E
    double N = kNaN;
    double g = kNaN;
    double h = kNaN;
    double log_w_carmona = kNaN;
    double q_series = kNaN;
    int pass = -1;                  // -1 unknown, 0 fail, 1 pass
    std::string error;

    // |(-1/2) log w - g| <= h when both sides are available.
    [[nodiscard]] bool acceptance() const {
        if (!std::isfinite(log_w_carmona) || !std::isfinite(g) || std::isnan(h)) return false;
        return std::abs(-0.5 * log_w_carmona - g) <= h;
    }
};

}  // namespace edgeweight
