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
#include "edgeweight/quadrature.hpp"
#include "edgeweight/transfer.hpp"
#include "edgeweight/wkb.hpp"

namespace edgeweight {

// Solution of -u'' + V u = E u at one position. (u, u') = (mu, mup) * 2^exp2;
// G = int_0^{min(x, N)} sqrt(V - E), the hyperbolic phase integral.
struct ShootSample {
    double x = 0.0;
    std::int64_t exp2 = 0;
    double mu = 0.0, mup = 0.0;
    double G = 0.0;
    bool breakpoint = false;  // the integrator landed here on request

    [[nodiscard]] double log_scale() const { return static_cast<double>(exp2) * kLn2; }
    [[nodiscard]] double u() const { return std::ldexp(mu, static_cast<int>(exp2)); }
    [[nodiscard]] double up() const { return std::ldexp(mup, static_cast<int>(exp2)); }
    // log(u^2 + u'^2)
    [[nodiscard]] double log_norm2() const { return 2.0 * log_scale() + std::log(mu * mu + mup * mup); }
};

struct ShootOptions {
    double tol = 1e-10;         // local relative error per step (step doubling)
    double h_initial = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.25;
    double fixed_step = 0.0;    // > 0: no error control, constant step
    std::vector<double> breakpoints;
};

struct Trajectory {
    double E = 0.0;
    double N = 0.0;  // V^{-1}(E)
    std::vector<ShootSample> samples;
    int steps = 0, rejected = 0;

    [[nodiscard]] const ShootSample& at_breakpoint(double x) const {
        for (const auto& s : samples)
            if (s.breakpoint && s.x == x) return s;
        throw DomainError("no sample recorded at x=" + std::to_string(x));
    }
};

namespace detail {
using Vec2 = std::array<double, 2>;

inline Vec2 rk4(const PotentialModel& V, double E, double x, const Vec2& y, double h) {
    auto f = [&](double t, const Vec2& s) { return Vec2{s[1], (V.V(t) - E) * s[0]}; };
    const Vec2 k1 = f(x, y);
    const Vec2 k2 = f(x + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const Vec2 k3 = f(x + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const Vec2 k4 = f(x + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// int_a^b sqrt(V - E) for a < b <= N, with the square-root zero at N.
inline double gamma_integral(const PotentialModel& V, double N, double a, double b) {
    if (!(b > a)) return 0.0;
    return quad::tanh_sinh([&](double x, double, double) { return std::sqrt(std::max(0.0, V.drop(x, N - x))); },
                           a, b, 1e-13, 8)
        .value;
}
}  // namespace detail

// Integrates -u'' + V u = E u from x_start with (u, u') = (u0, up0) to x_end
// by classical RK4, adapting the step by step doubling. Every accepted step is
// sampled; requested breakpoints are hit exactly.
inline Trajectory shoot_from(const PotentialModel& V, double E, double x_start, double u0, double up0, double x_end,
                             const ShootOptions& opt = {}) {
    if (!(E > 0.0)) throw DomainError("shooting needs E > 0");
    if (!(x_end > x_start)) throw DomainError("shooting needs x_end > x_start");
    if (!std::isfinite(V.V(x_start))) throw DomainError("potential is infinite at the starting point");
    Trajectory tr;
    tr.E = E;
    tr.N = V.inverse(E);
    std::vector<double> stops;
    for (double b : opt.breakpoints)
        if (b > x_start && b < x_end) stops.push_back(b);
    stops.push_back(x_end);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    ShootSample cur;
    cur.x = x_start;
    cur.mu = u0;
    cur.mup = up0;
    cur.G = x_start < tr.N ? detail::gamma_integral(V, tr.N, 0.0, x_start) : detail::gamma_integral(V, tr.N, 0.0, tr.N);
    cur.breakpoint = true;
    auto normalize = [](ShootSample& s) {
        const double m = std::max(std::abs(s.mu), std::abs(s.mup));
        if (m == 0.0 || !std::isfinite(m)) throw NumericalError("shooting: degenerate state at x=" + std::to_string(s.x));
        if (m >= 0.5 && m <= 2.0) return;
        int e = 0;
        std::frexp(m, &e);
        s.mu = std::ldexp(s.mu, -e);
        s.mup = std::ldexp(s.mup, -e);
        s.exp2 += e;
    };
    normalize(cur);
    tr.samples.push_back(cur);
    double h = opt.fixed_step > 0.0 ? opt.fixed_step : opt.h_initial;
    for (double stop : stops) {
        while (cur.x < stop) {
            const bool last = cur.x + h >= stop;
            const double step = last ? stop - cur.x : h;
            const detail::Vec2 y{cur.mu, cur.mup};
            detail::Vec2 next;
            if (opt.fixed_step > 0.0) {
                next = detail::rk4(V, E, cur.x, y, step);
            } else {
                const auto full = detail::rk4(V, E, cur.x, y, step);
                const auto half = detail::rk4(V, E, cur.x, y, 0.5 * step);
                next = detail::rk4(V, E, cur.x + 0.5 * step, half, 0.5 * step);
                const double scale = std::max({std::abs(next[0]), std::abs(next[1]), 1e-300});
                const double err = std::max(std::abs(next[0] - full[0]), std::abs(next[1] - full[1])) / (15.0 * scale);
                const double grow = err > 0.0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 4.0;
                if (err > opt.tol) {
                    ++tr.rejected;
                    h = step * std::max(0.1, grow);
                    if (h < opt.h_min)
                        throw NumericalError("shooting: step underflow at x=" + std::to_string(cur.x));
                    continue;
                }
                if (!last) h = std::min(opt.h_max, step * std::min(4.0, grow));
            }
            ShootSample s;
            s.x = last ? stop : cur.x + step;
            s.exp2 = cur.exp2;
            s.mu = next[0];
            s.mup = next[1];
            s.G = cur.G;
            if (cur.x < tr.N) s.G += detail::gamma_integral(V, tr.N, cur.x, std::min(s.x, tr.N));
            s.breakpoint = last;
            normalize(s);
            ++tr.steps;
            tr.samples.push_back(s);
            cur = s;
        }
    }
    return tr;
}

// Dirichlet solution u(0) = 0, u'(0) = 1 on [0, x_max], with breakpoints at
// N(E), N(E)+1 and any extra ones.
inline Trajectory shoot(const PotentialModel& V, double E, double x_max, ShootOptions opt = {}) {
    const double N = V.inverse(E);
    if (N > 0.0) opt.breakpoints.push_back(N);
    opt.breakpoints.push_back(N + 1.0);
    return shoot_from(V, E, 0.0, 0.0, 1.0, x_max, opt);
}

struct CheckStat {
    std::string name;
    std::int64_t instances = 0;
    double max_violation = 0.0;  // relative, 0 when the inequality holds
    double at_x = kNaN;          // position of the worst violation
    bool pass = true;
};

struct MonotoneReport {
    std::vector<CheckStat> checks;
    bool sandwich_skipped = false;
    double log_norm2_N = kNaN, sandwich_lower = kNaN, sandwich_upper = kNaN;
    [[nodiscard]] bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckStat& c) { return c.pass; });
    }
};

inline constexpr double kContinuumTolerance = 1e-8;

// Inequalities along [0, N(E)] for the Dirichlet solution: u' >= 1, u >= x,
// psi' >= 0 (f = u' - gamma u >= 0), psi' <= 1, W = psi' + 2 gamma psi <= 1
// with psi = u e^{-G}, and the sandwich
// -2 sqrt(V(0) - E) + 2G(N) <= log(u(N)^2 + u'(N)^2) <= log(N^2 + 1) + 2G(N) when N > 1.
inline MonotoneReport monotone_checks(const PotentialModel& V, double E, const Trajectory& tr,
                                      double tol = kContinuumTolerance) {
    MonotoneReport rep;
    CheckStat up1{"u' >= 1"}, ux{"u >= x"}, fpos{"psi' >= 0"}, fone{"psi' <= 1"}, w1{"W <= 1"};
    auto record = [&](CheckStat& c, double viol, double x) {
        ++c.instances;
        if (viol > c.max_violation) {
            c.max_violation = viol;
            c.at_x = x;
        }
    };
    const double N = tr.N;
    for (const auto& s : tr.samples) {
        if (s.x > N) break;
        const double gam = std::sqrt(std::max(0.0, V.drop(s.x, N - s.x)));
        const double u = s.u(), up = s.up();
        if (s.x < N) {
            record(up1, std::max(0.0, 1.0 - up) / std::max(1.0, std::abs(up)), s.x);
            record(ux, std::max(0.0, s.x - u) / std::max(1.0, std::abs(u)), s.x);
        }
        const double f = s.mup - gam * s.mu;
        const double mag = std::abs(s.mup) + gam * std::abs(s.mu);
        record(fpos, std::max(0.0, -f) / mag, s.x);
        // (u' -+ gamma u) e^{-G} <= 1 in log form.
        const double lp = f > 0.0 ? s.log_scale() + std::log(f) - s.G : -kInf;
        record(fone, std::max(0.0, std::expm1(lp)), s.x);
        const double lw = s.log_scale() + std::log(s.mup + gam * s.mu) - s.G;
        record(w1, std::max(0.0, std::expm1(lw)), s.x);
    }
    for (auto* c : {&up1, &ux, &fpos, &fone, &w1}) {
        c->pass = c->max_violation <= tol;
        rep.checks.push_back(*c);
    }
    CheckStat sw{"sandwich at N"};
    if (N > 1.0) {
        const auto& sN = tr.at_breakpoint(N);
        rep.log_norm2_N = sN.log_norm2();
        const double V0 = V.V0();
        rep.sandwich_lower = -2.0 * std::sqrt(V0 - E) + 2.0 * sN.G;
        rep.sandwich_upper = std::log(N * N + 1.0) + 2.0 * sN.G;
        sw.instances = 1;
        const double scale = std::max(1.0, std::abs(rep.log_norm2_N));
        sw.max_violation =
            std::max({0.0, rep.sandwich_lower - rep.log_norm2_N, rep.log_norm2_N - rep.sandwich_upper}) / scale;
        sw.at_x = N;
        sw.pass = sw.max_violation <= tol;
        rep.checks.push_back(sw);
    } else {
        rep.sandwich_skipped = true;
    }
    return rep;
}

// Modulus-variable bound past the turning point: int_{x_from}^{x_to} ||M||
// with ||M|| = -V' / (2 (E - V)) = (log kappa)', kappa = sqrt(E - V), by
// quadrature and in closed form, and the resulting transfer-matrix bound
// ||T(x_from, y)|| <= 2 max(1, k_inf) k_inf / (k_from min(1, k_from)) for all y.
struct ModulusBound {
    double x_from = 0.0, x_to = kInf;
    double integral_quadrature = 0.0;
    double integral_closed = 0.0;
    double kappa_from = 0.0, kappa_to = 0.0, kappa_inf = 0.0;
    double log_transfer_bound = 0.0;
};

inline ModulusBound modulus_bound(const PotentialModel& V, double E, double x_from, double x_to = kInf) {
    const double N = V.inverse(E);
    if (!(x_from > N)) throw DomainError("modulus bound needs x_from > N(E)");
    if (!(x_to > x_from)) throw DomainError("modulus bound needs x_to > x_from");
    ModulusBound m;
    m.x_from = x_from;
    m.x_to = x_to;
    auto kappa = [&](double x) { return std::sqrt(V.drop(N, x - N)); };  // E - V(x) = V(N) - V(x)
    auto norm_M = [&](double x) { return -V.dV(x) / (2.0 * V.drop(N, x - N)); };
    m.kappa_from = kappa(x_from);
    m.kappa_inf = std::sqrt(E);
    if (std::isinf(x_to)) {
        m.kappa_to = m.kappa_inf;
        // x = x_from + s / (1 - s), s in [0, 1).
        m.integral_quadrature = quad::tanh_sinh(
                                    [&](double s, double, double dr) {
                                        if (dr <= 0.0) return 0.0;
                                        const double x = x_from + s / dr;
                                        return norm_M(x) / (dr * dr);
                                    },
                                    0.0, 1.0, 1e-13, 9)
                                    .value;
    } else {
        m.kappa_to = kappa(x_to);
        m.integral_quadrature = quad::tanh_sinh([&](double x, double, double) { return norm_M(x); }, x_from, x_to,
                                                1e-13, 9)
                                    .value;
    }
    m.integral_closed = std::log(m.kappa_to / m.kappa_from);
    m.log_transfer_bound = std::log(2.0 * std::max(1.0, m.kappa_inf) * m.kappa_inf /
                                    (m.kappa_from * std::min(1.0, m.kappa_from)));
    return m;
}

// Largest log ||T(x_from, y)|| over the sample points, from the two solutions
// started at (1, 0) and (0, 1).
struct FundamentalCheck {
    std::vector<double> y;
    std::vector<double> log_norm;
    double max_log_norm = -kInf;
    double log_bound = 0.0;
    [[nodiscard]] bool ok(double slack = kContinuumTolerance) const { return max_log_norm <= log_bound + slack; }
};

inline FundamentalCheck fundamental_matrix_check(const PotentialModel& V, double E, double x_from,
                                                 const std::vector<double>& ys, const ShootOptions& base = {}) {
    if (ys.empty()) throw DomainError("fundamental matrix check needs sample points");
    ShootOptions opt = base;
    opt.breakpoints = ys;
    const double x_end = *std::max_element(ys.begin(), ys.end());
    const auto s1 = shoot_from(V, E, x_from, 1.0, 0.0, x_end, opt);
    const auto s2 = shoot_from(V, E, x_from, 0.0, 1.0, x_end, opt);
    FundamentalCheck fc;
    fc.log_bound = modulus_bound(V, E, x_from).log_transfer_bound;
    for (double y : ys) {
        if (!(y > x_from)) continue;
        const auto& a = s1.at_breakpoint(y);
        const auto& b = s2.at_breakpoint(y);
        const Mat2C T{a.u(), b.u(), a.up(), b.up()};
        const double ln = std::log(T.norm());
        fc.y.push_back(y);
        fc.log_norm.push_back(ln);
        fc.max_log_norm = std::max(fc.max_log_norm, ln);
    }
    return fc;
}

// Continuum rows: g(E) by quadrature, h(E) from the assembled envelope, and
// Q_est = (1/2) log(pi (u^2 + u'^2)) at x_max.
struct ContinuumOptions {
    double x_max = 0.0;  // 0: N + 1 + ten oscillation periods
    ShootOptions shoot;
};

inline EdgeProfile continuum_edge_row(const PotentialModel& V, double E, const ContinuumOptions& opt = {}) {
    EdgeProfile row;
    row.kind = "continuum";
    row.x = E;
    row.delta = E;
    try {
        const double V0 = V.V0();
        if (!(E > 0.0 && E < V0)) throw DomainError("E must lie in (0, V(0))");
        const double N = V.inverse(E);
        row.N = N;
        row.g = g_continuum(V, E);
        // The closed form is exact only without a shift.
        if (V.kind() == PotentialModel::Kind::power_law) row.q_series = continuum_g_closed_form(V.beta(), V.C0(), E);
        const auto env = h_envelope_continuum(V, E);
        row.h = env.h;
        const double x_max = opt.x_max > 0.0 ? opt.x_max : N + 1.0 + 20.0 * kPi / std::sqrt(E);
        const auto tr = shoot(V, E, x_max, opt.shoot);
        const double Q = 0.5 * (std::log(kPi) + tr.samples.back().log_norm2());
        row.log_w_carmona = -2.0 * Q;
        row.pass = row.acceptance() ? 1 : 0;
    } catch (const Error& e) {
        row.error = e.what();
        row.pass = 0;
    }
    return row;
}

inline std::vector<EdgeProfile> continuum_edge_profile(const PotentialModel& V, const std::vector<double>& E_grid,
                                                       const ContinuumOptions& opt = {}, unsigned threads = 0) {
    std::vector<EdgeProfile> rows(E_grid.size());
    parallel_for(E_grid.size(), [&](std::size_t i) { rows[i] = continuum_edge_row(V, E_grid[i], opt); }, threads);
    return rows;
}

}  // namespace edgeweight
