#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"
#include "edgeweight/wkb.hpp"

namespace edgeweight {

using Rational = boost::multiprecision::cpp_rational;

// Taylor coefficients of arccosh(1 + z/2) / sqrt(z) = sum_l c_l z^l, exactly:
// c_l = (-1)^l binom(2l, l) / (16^l (2l + 1)).
struct CoeffTable {
    std::vector<Rational> c;

    [[nodiscard]] std::size_t size() const { return c.size(); }
    [[nodiscard]] double as_double(std::size_t l) const { return static_cast<double>(c.at(l)); }

    // "num/den" (or "num" when the denominator is 1).
    [[nodiscard]] std::string as_string(std::size_t l) const {
        const auto& r = c.at(l);
        const auto num = boost::multiprecision::numerator(r);
        const auto den = boost::multiprecision::denominator(r);
        if (den == 1) return num.str();
        return num.str() + "/" + den.str();
    }

    // sqrt(z) * sum_{l<=L} c_l z^l in double precision.
    [[nodiscard]] double partial_sum(double z) const {
        double s = 0.0;
        for (std::size_t l = c.size(); l-- > 0;) s = s * z + as_double(l);
        return std::sqrt(z) * s;
    }
};

// c_0..c_L by the ratio c_l / c_{l-1} = -(2l-1)^2 / (8 l (2l+1)).
inline CoeffTable arccosh_coeffs(int L) {
    if (L < 0) throw DomainError("arccosh_coeffs needs L >= 0");
    CoeffTable t;
    t.c.reserve(L + 1);
    t.c.emplace_back(1);
    for (int l = 1; l <= L; ++l) {
        const Rational ratio(-(2 * l - 1) * (2 * l - 1), 8 * l * (2 * l + 1));
        t.c.push_back(t.c.back() * ratio);
    }
    return t;
}

// Commonly quoted value of c_20, checked against exact arithmetic.
inline constexpr const char* kQuotedC20 = "34461632205/12391489651049749040738304";

struct C20Comparison {
    std::string computed;
    std::string quoted = kQuotedC20;
    bool match = false;
    // Positions (0-based, in the denominator string) where the digits differ.
    std::vector<std::size_t> differing_digits;
};

inline C20Comparison compare_c20() {
    C20Comparison cmp;
    cmp.computed = arccosh_coeffs(20).as_string(20);
    cmp.match = cmp.computed == cmp.quoted;
    const auto slash_a = cmp.computed.find('/'), slash_b = cmp.quoted.find('/');
    const std::string da = cmp.computed.substr(slash_a + 1), db = cmp.quoted.substr(slash_b + 1);
    for (std::size_t i = 0; i < std::min(da.size(), db.size()); ++i)
        if (da[i] != db[i]) cmp.differing_digits.push_back(i);
    return cmp;
}

// Growing terms of the edge expansion of Q(x) for b_n = -C n^{-beta}, x = 2 - delta:
// sum over 0 <= l < 1/beta - 1/2 of
// beta^{-1} C^{1/beta} c_l Gamma(l+3/2) Gamma(1/beta-1/2-l) / Gamma(1/beta+1) delta^{-1/beta+l+1/2}.
struct SeriesTerm {
    int l = 0;
    double coefficient = 0.0;  // multiplies delta^exponent
    double exponent = 0.0;
    double value = 0.0;
};

struct SeriesQ {
    double beta = 0.0, C = 0.0, delta = 0.0;
    std::vector<SeriesTerm> terms;
    double total = 0.0;
    bool borderline_excluded = false;  // 1/beta - 1/2 is an integer; that term is O(log delta)
    std::string advisory;
};

inline SeriesQ q_series(double beta, double C, double delta) {
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("q_series needs beta in (0, 2)");
    if (!(C > 0.0)) throw DomainError("q_series needs C > 0");
    if (!(delta > 0.0)) throw DomainError("q_series needs delta > 0");
    SeriesQ q;
    q.beta = beta;
    q.C = C;
    q.delta = delta;
    const double top = 1.0 / beta - 0.5;
    if (top <= 0.0) {
        q.advisory = "no growing terms: 1/beta - 1/2 <= 0";
        return q;
    }
    const int L = static_cast<int>(std::ceil(top + 1e-9));
    const auto coeffs = arccosh_coeffs(std::max(0, L));
    const double pre = std::pow(C, 1.0 / beta) / beta / std::tgamma(1.0 / beta + 1.0);
    NeumaierSum sum;
    for (int l = 0; l < L + 1; ++l) {
        if (static_cast<double>(l) >= top - 1e-9) {
            q.borderline_excluded = std::abs(static_cast<double>(l) - top) <= 1e-9;
            break;
        }
        SeriesTerm t;
        t.l = l;
        t.coefficient = pre * coeffs.as_double(l) * std::tgamma(l + 1.5) * std::tgamma(top - l);
        t.exponent = -1.0 / beta + l + 0.5;
        t.value = t.coefficient * std::pow(delta, t.exponent);
        sum.add(t.value);
        q.terms.push_back(t);
    }
    q.total = sum.value();
    if (C > 1.0)
        q.advisory = "C > 1: indices with C j^{-beta} > 1 lie outside the expansion's convergence region; "
                     "the O(1) discrepancy is left in the residual";
    return q;
}

// Closed form of the continuum exponent for V = C0 x^{-beta}:
// g(E) = beta^{-1} Gamma(3/2) Gamma(1/beta - 1/2) / Gamma(1/beta + 1) C0^{1/beta} E^{1/2 - 1/beta}.
inline double continuum_g_closed_form(double beta, double C0, double E) {
    if (!(beta > 0.0 && beta < 2.0)) throw DomainError("closed form needs beta in (0, 2)");
    return std::tgamma(1.5) * std::tgamma(1.0 / beta - 0.5) / std::tgamma(1.0 / beta + 1.0) / beta *
           std::pow(C0, 1.0 / beta) * std::pow(E, 0.5 - 1.0 / beta);
}

// Residual of the discrete exponent against the series on a delta grid.
struct ResidualRow {
    double delta = 0.0;
    double requested_delta = 0.0;  // before the cap was applied
    std::int64_t N = 0;
    double g = 0.0, q = 0.0, residual = 0.0, ratio = 0.0;  // ratio = residual / log(1/delta)
    bool capped = false;
};

struct ResidualTable {
    double beta = 0.0, C = 0.0;
    std::int64_t N_cap = 0;
    double delta_floor = 0.0;
    std::vector<ResidualRow> rows;
    double max_ratio = 0.0;
    bool bounded = true;
    std::string note;
};

// r(delta) = |sum_{j<=N} gamma_j - q_series(delta)| / log(1/delta). Grid points whose
// turning index exceeds N_cap are moved to the floor delta with N = N_cap and
// duplicates dropped. The table is flagged unbounded when the ratio grows by more
// than 1% at every step of the grid.
inline ResidualTable g_minus_series_residual(double beta, double C, const std::vector<double>& delta_grid,
                                             std::int64_t N_cap = 100'000'000, unsigned threads = 0) {
    if (delta_grid.size() < 2) throw DomainError("residual table needs at least two grid points");
    ResidualTable t;
    t.beta = beta;
    t.C = C;
    t.N_cap = N_cap;
    t.delta_floor = C * std::pow(static_cast<double>(N_cap), -beta);
    const auto model = ParameterModel::power_law_b(C, beta);
    bool any_capped = false;
    for (double d : delta_grid) {
        if (!(d > 0.0 && d < 2.0)) throw DomainError("residual grid needs delta in (0, 2)");
        ResidualRow r;
        r.requested_delta = d;
        r.delta = std::max(d, t.delta_floor);
        r.capped = r.delta != d;
        any_capped = any_capped || r.capped;
        if (!t.rows.empty() && t.rows.back().delta == r.delta) continue;
        const auto pt = EdgePoint::from_delta(r.delta);
        r.N = turning_index(model, pt);
        if (r.N > N_cap) r.N = N_cap;
        r.g = g_sum(model, pt, r.N, threads);
        r.q = q_series(beta, C, r.delta).total;
        r.residual = std::abs(r.g - r.q);
        r.ratio = r.residual / std::log(1.0 / r.delta);
        t.max_ratio = std::max(t.max_ratio, r.ratio);
        t.rows.push_back(r);
    }
    if (t.rows.size() >= 2) {
        bool growing = true;
        for (std::size_t i = 1; i < t.rows.size(); ++i)
            growing = growing && t.rows[i].ratio > 1.01 * t.rows[i - 1].ratio;
        t.bounded = !growing;
    }
    if (any_capped)
        t.note = "grid capped at N <= " + std::to_string(N_cap) + " (delta floor " + std::to_string(t.delta_floor) + ")";
    return t;
}

// S_N = sum_{j=2}^N sqrt(f(log j) - f(log N)) against N (-f'(log N))^{1/2}.
struct SqrtDropSum {
    std::int64_t N = 0;
    double S = 0.0;
    double scale = 0.0;        // N (-f'(log N))^{1/2}
    double ratio = 0.0;        // S / scale
    double lower_bound = 0.0;  // scale * (1/N) sum_{j=2}^N (-log(j/N))^{1/2}
    bool lower_bound_holds = false;
};

inline constexpr double kSqrtPiOver2 = 0.88622692545275801365;  // sqrt(pi)/2

inline SqrtDropSum sqrt_drop_sum(const MonotoneF& f, std::int64_t N, unsigned threads = 0) {
    if (N < 2) throw DomainError("sqrt_drop_sum needs N >= 2");
    SqrtDropSum r;
    r.N = N;
    const double logN = std::log(static_cast<double>(N));
    const double dN = static_cast<double>(N);
    r.S = chunked_sum(
        2, static_cast<std::uint64_t>(N),
        [&](std::uint64_t j) {
            const double jj = static_cast<double>(j);
            const double d = f.drop(std::log(jj), std::log(dN / jj));
            if (d < 0.0) throw DomainError("sqrt_drop_sum: f(log j) < f(log N), f is not decreasing");
            return std::sqrt(d);
        },
        threads);
    r.scale = dN * std::sqrt(-f.derivative(logN));
    r.ratio = r.S / r.scale;
    const double riemann = chunked_sum(
        2, static_cast<std::uint64_t>(N),
        [&](std::uint64_t j) { return std::sqrt(std::log(dN / static_cast<double>(j))); }, threads);
    r.lower_bound = r.scale * riemann / dN;
    // Exact inequality up to rounding: one ulp per term.
    const double slack = dN * std::numeric_limits<double>::epsilon() * std::max(r.S, r.lower_bound);
    r.lower_bound_holds = r.S + slack >= r.lower_bound;
    return r;
}

// Trend of |ratio - sqrt(pi)/2| across increasing N: least-squares slope
// against log N and the first/last gaps.
struct SqrtDropTrend {
    std::vector<SqrtDropSum> rows;
    double first_gap = 0.0, final_gap = 0.0, slope = 0.0;
    bool all_lower_bounds = true;
    bool converging = false;  // slope < 0 and final gap below first gap
};

inline SqrtDropTrend sqrt_drop_trend(const MonotoneF& f, const std::vector<std::int64_t>& Ns, unsigned threads = 0) {
    SqrtDropTrend t;
    std::vector<double> lx, gy;
    for (auto N : Ns) {
        t.rows.push_back(sqrt_drop_sum(f, N, threads));
        t.all_lower_bounds = t.all_lower_bounds && t.rows.back().lower_bound_holds;
        lx.push_back(std::log(static_cast<double>(N)));
        gy.push_back(std::abs(t.rows.back().ratio - kSqrtPiOver2));
    }
    if (t.rows.empty()) return t;
    t.first_gap = gy.front();
    t.final_gap = gy.back();
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += gy[i];
        }
        mx /= lx.size();
        my /= lx.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (gy[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        t.slope = sxy / sxx;
        t.converging = t.slope < 0.0 && t.final_gap < t.first_gap;
    }
    return t;
}

// Turning index and leading exponent for a_n = 1 - f(log(n+1)) at x = 2 - delta.
struct LogLawEdgeRow {
    double x = 0.0, delta = 0.0;
    double N_formula = 0.0;     // floor(exp(f^{-1}(1 - x/2))) - 1 (may exceed integer range)
    std::int64_t N = 0;         // turning index from the model
    double g_asymptotic = 0.0;  // sqrt(pi/2) N (-f'(log N))^{1/2}
    double g_direct = kNaN;     // sum of gamma_j when N <= direct_limit
    double relative_gap = kNaN; // |g_direct / g_asymptotic - 1|
    std::string error;
};

inline std::vector<LogLawEdgeRow> log_law_edge_profile(const MonotoneF& f, const std::vector<double>& deltas,
                                                   std::int64_t direct_limit = 10'000'000, unsigned threads = 0) {
    const auto model = ParameterModel::log_law_a(f);
    std::vector<LogLawEdgeRow> out;
    for (double d : deltas) {
        LogLawEdgeRow r;
        r.delta = d;
        r.x = 2.0 - d;
        const double y = f.inverse(0.5 * d);
        const double e = std::exp(y);
        if (!(e < 9.0e15)) {
            r.N_formula = std::isfinite(e) ? std::floor(e) - 1.0 : kInf;
            r.error = "turning index overflows the index type at delta=" + std::to_string(d);
            out.push_back(r);
            continue;
        }
        r.N_formula = std::floor(e) - 1.0;
        r.N = turning_index(model, EdgePoint::from_delta(d));
        const double NN = static_cast<double>(r.N);
        r.g_asymptotic = std::sqrt(kPi / 2.0) * NN * std::sqrt(-f.derivative(std::log(NN)));
        if (r.N <= direct_limit && r.N >= 1) {
            r.g_direct = g_sum(model, EdgePoint::from_delta(d), r.N, threads);
            r.relative_gap = std::abs(r.g_direct / r.g_asymptotic - 1.0);
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace edgeweight
