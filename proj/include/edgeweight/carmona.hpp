#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "edgeweight/asymptotics.hpp"
#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"
#include "edgeweight/quadrature.hpp"
#include "edgeweight/recurrence.hpp"
#include "edgeweight/transfer.hpp"
#include "edgeweight/wkb.hpp"

namespace edgeweight {

// log of the Carmona density 1 / (pi (a_n^2 p_n(x)^2 + p_{n-1}(x)^2)).
template <class Params>
double carmona_density(const Params& model, double x, std::int64_t n) {
    return -std::log(kPi) - eta_n(model, x, n);
}

// Carmona log-densities at several points, sharing one pass over the parameters.
template <class Params, std::size_t K>
std::array<double, K> carmona_density_batch(const Params& model, const std::array<double, K>& xs, std::int64_t n) {
    if (n < 1) throw DomainError("carmona density needs n >= 1");
    std::array<LogScaledPair, K> s{};
    for (std::int64_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < K; ++i) s[i] = step_p(model, xs[i], s[i]);
    std::array<double, K> out{};
    for (std::size_t i = 0; i < K; ++i) out[i] = -std::log(kPi) - log_eta(model, s[i]);
    return out;
}

// Normalized C^2 bump (35/32)(1 - t^2)^3 / w on [x0 - w, x0 + w], as a log.
inline double log_bump(double x, double x0, double w) {
    const double t = (x - x0) / w;
    const double s = 1.0 - t * t;
    if (s <= 0.0) return -kInf;
    return std::log(35.0 / 32.0) + 3.0 * std::log(s) - std::log(w);
}

struct CarmonaEstimate {
    enum class Method { pointwise, bump_integrated, n_averaged };
    double x0 = 0.0;
    std::int64_t n = 0;
    double bump_width = 0.0;
    double value = kNaN;  // log w estimate
    Method method = Method::bump_integrated;
    double rel_error = 0.0;  // quadrature error estimate (bump mode)
    int panels = 0;

    [[nodiscard]] static const char* method_name(Method m) {
        switch (m) {
            case Method::pointwise: return "pointwise";
            case Method::bump_integrated: return "bump-integrated";
            case Method::n_averaged: return "n-averaged";
        }
        return "?";
    }
};

// Panels needed to resolve the oscillation of the n-th density over the bump:
// about two per period, the phase advancing by n dtheta with dtheta ~ dx / sqrt(4 - x^2).
inline int bump_panels(double x0, double width, std::int64_t n) {
    const double s = std::sqrt(std::max(1e-12, 4.0 - x0 * x0));
    const double periods = static_cast<double>(n) * 2.0 * width / (kPi * s);
    return static_cast<int>(std::clamp(2.0 * periods, 8.0, 2000.0));
}

// Integral of the normalized bump against the n-th Carmona density.
inline CarmonaEstimate weight_estimate(const ParameterModel& model, double x0, double bump_width, std::int64_t n,
                                       unsigned threads = 0) {
    if (!(bump_width > 0.0)) throw DomainError("bump width must be positive");
    if (!(x0 - bump_width > -2.0 && x0 + bump_width < 2.0))
        throw DomainError("bump [x0 - w, x0 + w] must lie inside (-2, 2)");
    if (n < 1) throw DomainError("weight_estimate needs n >= 1");
    const ParameterTable table(model, n);
    CarmonaEstimate est;
    est.x0 = x0;
    est.n = n;
    est.bump_width = bump_width;
    est.method = CarmonaEstimate::Method::bump_integrated;
    const int init = bump_panels(x0, bump_width, n);
    const auto r = quad::integrate_log_batch(
        [&](const std::array<double, 15>& x, std::array<double, 15>& lv) {
            lv = carmona_density_batch(table, x, n);
            for (int i = 0; i < 15; ++i) lv[i] += log_bump(x[i], x0, bump_width);
        },
        x0 - bump_width, x0 + bump_width, 1e-3, init, std::max(4000, 4 * init), threads);
    est.value = r.log_value;
    est.rel_error = r.rel_error;
    est.panels = r.panels;
    return est;
}

// log of the mean Carmona density over k in [n, 2n] at x0.
inline CarmonaEstimate weight_estimate_averaged(const ParameterModel& model, double x0, std::int64_t n) {
    if (n < 1) throw DomainError("weight_estimate_averaged needs n >= 1");
    const ParameterTable table(model, 2 * n);
    LogScaledPair s = advance_to(table, x0, n);
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(n + 1));
    for (std::int64_t k = n;; ++k) {
        logs.push_back(-std::log(kPi) - log_eta(table, s));
        if (k == 2 * n) break;
        s = step_p(table, x0, s);
    }
    CarmonaEstimate est;
    est.x0 = x0;
    est.n = n;
    est.method = CarmonaEstimate::Method::n_averaged;
    est.value = log_sum_exp(logs) - std::log(static_cast<double>(logs.size()));
    return est;
}

inline CarmonaEstimate weight_estimate_pointwise(const ParameterModel& model, double x0, std::int64_t n) {
    CarmonaEstimate est;
    est.x0 = x0;
    est.n = n;
    est.method = CarmonaEstimate::Method::pointwise;
    est.value = carmona_density(model, x0, n);
    return est;
}

// Default index: max(10 N, 1000), and past the turning point of every bump point.
inline std::int64_t default_carmona_n(std::int64_t N_center, std::int64_t N_edge_of_bump) {
    return std::max({10 * N_center, std::int64_t{1000}, N_edge_of_bump + 3});
}

// Bump half-width for an edge point: start at min(0.1, delta/4) and halve until
// g moves by at most h/10 across the bump.
inline double auto_bump_width(const ParameterModel& model, const EdgePoint& pt, double g, double h,
                              unsigned threads = 0) {
    double w = std::min(0.1, pt.delta / 4.0);
    if (!std::isfinite(h)) return w;
    for (int it = 0; it < 40; ++it) {
        const auto near = EdgePoint::from_delta(pt.delta - w, pt.x >= 0 ? 1 : -1);
        const auto far = EdgePoint::from_delta(pt.delta + w, pt.x >= 0 ? 1 : -1);
        const double gn = g_sum(model, near, turning_index(model, near), threads);
        const double gf = g_sum(model, far, turning_index(model, far), threads);
        if (std::max(std::abs(gn - g), std::abs(gf - g)) <= 0.1 * h) return w;
        w *= 0.5;
    }
    return w;
}

struct EdgeOptions {
    std::int64_t n = 0;        // 0: default policy
    double bump_width = 0.0;   // 0: automatic
    unsigned threads = 0;
};

// The discrete pipeline for one point: N, g, h, the bump-integrated Carmona
// estimate, the series value when available, and the acceptance flag.
inline EdgeProfile edge_profile(const ParameterModel& model, double x, const EdgeOptions& opt = {}) {
    EdgeProfile row;
    row.kind = "discrete";
    row.x = x;
    try {
        if (!(std::abs(x) < 2.0)) throw DomainError("x must lie in (-2, 2)");
        const bool a_case = model.model_case() == ModelCase::a_case;
        const auto pt = EdgePoint::at(x);
        row.delta = pt.delta;
        if (!a_case && x < 0.0) {
            // Lower edge of a b-case model: every index is elliptic.
            row.kind = "lower-edge";
            const auto env = lower_edge_envelope(model, x);
            row.N = 0.0;
            // Report -1/2 log w as center +- half-width of the envelope.
            row.g = -0.25 * (env.log_w_lower + env.log_w_upper);
            row.h = 0.25 * (env.log_w_upper - env.log_w_lower);
            const double w = opt.bump_width > 0.0 ? opt.bump_width : std::min(0.1, pt.delta / 4.0);
            const std::int64_t n = opt.n > 0 ? opt.n : 1000;
            row.log_w_carmona = weight_estimate(model, x, w, n, opt.threads).value;
        } else {
            const auto env = h_envelope(model, pt);
            row.N = static_cast<double>(env.N);
            row.g = g_sum(model, pt, env.N, opt.threads);
            row.h = env.reported();
            const double w =
                opt.bump_width > 0.0 ? opt.bump_width : auto_bump_width(model, pt, row.g, row.h, opt.threads);
            const auto edge = EdgePoint::from_delta(pt.delta - w, x >= 0.0 ? 1 : -1);
            const std::int64_t n = opt.n > 0 ? opt.n : default_carmona_n(env.N, turning_index(model, edge));
            row.log_w_carmona = weight_estimate(model, x, w, n, opt.threads).value;
            if (model.kind() == ParameterModel::Kind::power_law_b && x > 0.0 && 1.0 / model.beta() - 0.5 > 0.0 &&
                pt.delta < 1.0)
                row.q_series = q_series(model.beta(), model.C(), pt.delta).total;
        }
        row.pass = row.acceptance() ? 1 : 0;
    } catch (const Error& e) {
        row.error = e.what();
        row.pass = 0;
    }
    return row;
}

// Truncated Szegő and quasi-Szegő integrals of log w (4 - x^2)^{-+1/2} over
// [2 - delta_max, 2 - delta_cut] for a power-law b-model, with Q from the edge
// series, and the fitted power p of the increments over a geometric grid:
// I(delta_{k}) - I(delta_{k-1}) ~ delta_k^p. p < 0 diverges, p ~ 0 diverges
// logarithmically, p > 0 converges.
struct IntegralFit {
    std::vector<double> cumulative;  // I at each delta_cut (I(delta_max) = 0)
    double exponent = kNaN;
    bool monotone = true;
    std::string classification;
};

struct SzegoDiagnostic {
    double beta = 0.0, C = 0.0, delta_max = 0.0;
    std::vector<double> delta_cut;
    IntegralFit szego, quasi;
    double expected_szego = kNaN, expected_quasi = kNaN;  // 1 - 1/beta, 2 - 1/beta
    std::string classification;
};

inline constexpr double kBorderlineExponent = 0.1;

inline std::string classify_exponent(double p) {
    if (p < -kBorderlineExponent) return "diverges";
    if (p <= kBorderlineExponent) return "borderline (logarithmic divergence)";
    return "converges";
}

inline SzegoDiagnostic szego_diagnostic(const ParameterModel& model, const std::vector<double>& delta_grid) {
    if (model.kind() != ParameterModel::Kind::power_law_b)
        throw ModelError("szego diagnostic needs a power-law b model (Q from the edge series)");
    if (delta_grid.size() < 4) throw DomainError("szego diagnostic needs at least four grid points");
    for (std::size_t i = 1; i < delta_grid.size(); ++i)
        if (!(delta_grid[i] < delta_grid[i - 1])) throw DomainError("delta grid must be strictly decreasing");
    if (!(delta_grid.front() < 1.0 && delta_grid.back() > 0.0)) throw DomainError("delta grid must lie in (0, 1)");
    const double r0 = delta_grid[1] / delta_grid[0];
    for (std::size_t i = 2; i < delta_grid.size(); ++i)
        if (std::abs(delta_grid[i] / delta_grid[i - 1] / r0 - 1.0) > 1e-6)
            throw DomainError("szego diagnostic needs a geometric delta grid");
    SzegoDiagnostic d;
    d.beta = model.beta();
    d.C = model.C();
    d.delta_max = delta_grid.front();
    d.delta_cut.assign(delta_grid.begin() + 1, delta_grid.end());
    d.expected_szego = 1.0 - 1.0 / d.beta;
    d.expected_quasi = 2.0 - 1.0 / d.beta;
    auto fit = [&](double sign) {
        IntegralFit f;
        std::vector<double> lx, ly;
        double total = 0.0;
        for (std::size_t k = 1; k < delta_grid.size(); ++k) {
            const double lo = std::log(delta_grid[k]), hi = std::log(delta_grid[k - 1]);
            // delta = e^s; log w = -2 Q; dx = d delta.
            const auto r = quad::gauss_kronrod(
                [&](double s) {
                    const double dl = std::exp(s);
                    const double Q = q_series(d.beta, d.C, dl).total;
                    return -2.0 * Q * std::pow(dl * (4.0 - dl), sign * 0.5) * dl;
                },
                lo, hi, 0.0, 1e-12);
            total += r.value;
            f.cumulative.push_back(total);
            if (r.value > 0.0) f.monotone = false;
            lx.push_back(std::log(delta_grid[k]));
            ly.push_back(std::log(std::abs(r.value)));
        }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        f.exponent = sxy / sxx;
        f.classification = classify_exponent(f.exponent);
        return f;
    };
    d.szego = fit(-1.0);
    d.quasi = fit(+1.0);
    if (d.szego.classification == "converges")
        d.classification = "Szegő";
    else if (d.quasi.classification == "converges")
        d.classification = d.szego.exponent > -kBorderlineExponent ? "Szegő borderline" : "quasi-Szegő, not Szegő";
    else if (d.quasi.classification == "diverges")
        d.classification = "neither Szegő nor quasi-Szegő";
    else
        d.classification = "quasi-Szegő borderline";
    return d;
}

}  // namespace edgeweight
