#pragma once

#include <cmath>
#include <cstdint>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"

namespace edgeweight {

// A spectral parameter together with its distance to the nearest band edge,
// delta = 2 - |x|, carried separately so that points very close to the edge
// keep full relative precision.
struct EdgePoint {
    double x = 0.0;
    double delta = 2.0;

    static EdgePoint at(double x) { return {x, 2.0 - std::abs(x)}; }
    // x = sign * (2 - delta).
    static EdgePoint from_delta(double delta, int sign = +1) {
        return {sign >= 0 ? 2.0 - delta : delta - 2.0, delta};
    }
};

// Excess e_n = t_n - 2 of the normalized trace t_n = (x - b_n)/a_n; the
// recurrence is hyperbolic at n iff e_n >= 0. For a-case models t_n uses |x|
// (parity p_n(-x) = (-1)^n p_n(x) when b = 0).
inline double excess(const ParameterModel& model, const EdgePoint& pt, std::int64_t n) {
    if (model.model_case() == ModelCase::b_case) {
        const double dist = pt.x > 0.0 ? pt.delta : 2.0 - pt.x;  // 2 - x
        return -model.b(n) - dist;
    }
    const double an = model.a(n);
    return (2.0 * model.a_deficit(n) - pt.delta) / an;
}

// gamma_n = arccosh(t_n / 2) for e_n >= 0.
inline double gamma_from_excess(double e) {
    if (e < 0.0) throw DomainError("gamma_n requested in the elliptic region");
    return acosh1p(0.5 * e);
}

// kappa_n = arccos(t_n / 2) for e_n <= 0.
inline double kappa_from_excess(double e) {
    if (e > 0.0) throw DomainError("kappa_n requested in the hyperbolic region");
    return acos_deficit(-e);
}

inline double gamma_n(const ParameterModel& model, const EdgePoint& pt, std::int64_t n) {
    return gamma_from_excess(excess(model, pt, n));
}

inline double kappa_n(const ParameterModel& model, const EdgePoint& pt, std::int64_t n) {
    return kappa_from_excess(excess(model, pt, n));
}

// kappa_inf = arccos(|x|/2), the limiting phase.
inline double kappa_infinity(const EdgePoint& pt) { return acos_deficit(pt.delta); }

// 1/sin(y) - 1/y, increasing on (0, pi); the supremum over (0, y].
inline double e_of_y(double y) {
    if (!(y > 0.0 && y < kPi)) throw DomainError("e(y) needs 0 < y < pi");
    if (y < 1e-4) return y / 6.0 + 7.0 * y * y * y / 360.0;
    return 1.0 / std::sin(y) - 1.0 / y;
}

}  // namespace edgeweight
