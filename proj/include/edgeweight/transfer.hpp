#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"
#include "edgeweight/recurrence.hpp"
#include "edgeweight/wkb.hpp"

namespace edgeweight {

using cplx = std::complex<double>;

// 2x2 complex matrix [[a, b], [c, d]].
struct Mat2C {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2C identity() { return {}; }

    friend Mat2C operator*(const Mat2C& l, const Mat2C& r) {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
    friend Mat2C operator-(const Mat2C& l, const Mat2C& r) { return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d}; }
    Mat2C& operator*=(cplx s) {
        a *= s;
        b *= s;
        c *= s;
        d *= s;
        return *this;
    }

    [[nodiscard]] cplx det() const { return a * d - b * c; }
    [[nodiscard]] cplx trace() const { return a + d; }

    [[nodiscard]] Mat2C inverse() const {
        const cplx dt = det();
        if (dt == cplx(0.0)) throw DomainError("Mat2C::inverse of a singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    // Largest singular value from the closed form for 2x2 matrices.
    [[nodiscard]] double norm() const {
        const double fro2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
        const double ad = std::abs(det());
        const double disc = std::max(0.0, (fro2 - 2.0 * ad) * (fro2 + 2.0 * ad));
        return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
    }
    // Smallest singular value.
    [[nodiscard]] double min_singular() const {
        const double s = norm();
        return s == 0.0 ? 0.0 : std::abs(det()) / s;
    }
    [[nodiscard]] double max_entry_diff(const Mat2C& o) const {
        return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
    }
};

// Real 2x2 product kept as mantissa * 2^exp2, for transfer matrices whose
// entries leave double range.
struct ScaledMat2 {
    std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};  // row-major
    std::int64_t exp2 = 0;

    // this <- A * this
    void left_multiply(const std::array<double, 4>& A) {
        const std::array<double, 4> r{A[0] * m[0] + A[1] * m[2], A[0] * m[1] + A[1] * m[3],
                                      A[2] * m[0] + A[3] * m[2], A[2] * m[1] + A[3] * m[3]};
        m = r;
        const double mx = std::max({std::abs(m[0]), std::abs(m[1]), std::abs(m[2]), std::abs(m[3])});
        if (!std::isfinite(mx) || mx == 0.0) throw NumericalError("ScaledMat2: degenerate product");
        if (mx < 0.5 || mx > 2.0) {
            int e = 0;
            std::frexp(mx, &e);
            for (double& v : m) v = std::ldexp(v, -e);
            exp2 += e;
        }
    }
    [[nodiscard]] double log_norm() const {
        const Mat2C c{m[0], m[1], m[2], m[3]};
        return static_cast<double>(exp2) * kLn2 + std::log(c.norm());
    }
    [[nodiscard]] double log_abs_det() const {
        return 2.0 * static_cast<double>(exp2) * kLn2 + std::log(std::abs(m[0] * m[3] - m[1] * m[2]));
    }
};

// A_n(x) = (1/a_n) [[x - b_n, -1], [a_n^2, 0]], mapping (p_{n-1}, a_{n-1} p_{n-2})
// to (p_n, a_n p_{n-1}). Determinant 1.
inline std::array<double, 4> step_matrix_real(const ParameterModel& model, double x, std::int64_t n) {
    const double an = model.a(n);
    return {(x - model.b(n)) / an, -1.0 / an, an, 0.0};
}

inline Mat2C step_matrix(const ParameterModel& model, double x, std::int64_t n) {
    const auto r = step_matrix_real(model, x, n);
    return {r[0], r[1], r[2], r[3]};
}

// Y(kappa) = [[1, 1], [e^{-i k}, e^{i k}]], V(kappa) = diag(e^{i k}, e^{-i k}),
// Y^{-1} = (1 / (2 i sin k)) [[e^{i k}, -1], [-e^{-i k}, 1]], with
// Y V Y^{-1} = [[2 cos k, -1], [1, 0]].
struct KoomanFactors {
    Mat2C Y, V, Y_inv;
};

inline KoomanFactors kooman_factors(double kappa) {
    if (!(kappa > 0.0 && kappa < kPi)) throw DomainError("kooman_factors needs 0 < kappa < pi");
    const cplx e = std::polar(1.0, kappa), em = std::polar(1.0, -kappa);
    KoomanFactors f;
    f.Y = {1.0, 1.0, em, e};
    f.V = {e, 0.0, 0.0, em};
    f.Y_inv = {e, -1.0, -em, 1.0};
    f.Y_inv *= 1.0 / cplx(0.0, 2.0 * std::sin(kappa));
    return f;
}

// Exact norm of Y(k1)^{-1} Y(k0).
inline double consecutive_norm(double kappa0, double kappa1) {
    return (kooman_factors(kappa1).Y_inv * kooman_factors(kappa0).Y).norm();
}

// Upper bound 1 + |e^{i k1} - e^{i k0}| / sin(k1) for ||Y(k1)^{-1} Y(k0)||.
inline double consecutive_bound(double kappa0, double kappa1) {
    if (!(kappa1 > 0.0 && kappa1 < kPi)) throw DomainError("consecutive_bound needs 0 < kappa < pi");
    return 1.0 + 2.0 * std::abs(std::sin(0.5 * (kappa1 - kappa0))) / std::sin(kappa1);
}

// Closed bound for the elliptic transfer matrix started at index ell with phase
// kappa_ell (log value). b-case: 2/sin k_ell * k_inf/k_ell * exp(k_inf e(k_inf)).
// a-case: 2/(a_ell sin k_ell) * k_inf/k_ell * exp(2 k_inf e(2 k_inf)).
inline double closed_transfer_bound(bool a_case, double kappa_ell, double kappa_inf, double a_ell = 1.0) {
    const double chain = std::log(kappa_inf / kappa_ell);
    if (!a_case) return kLn2 - std::log(std::sin(kappa_ell)) + chain + kappa_inf * e_of_y(kappa_inf);
    return kLn2 - std::log(a_ell) - std::log(std::sin(kappa_ell)) + chain + 2.0 * kappa_inf * e_of_y(2.0 * kappa_inf);
}

// Pointwise chain for T_n = A_n ... A_{n_from+1}, n_from < n <= n_to:
// direct norm <= product bound <= closed bound (all logs).
struct TransferChain {
    std::vector<std::int64_t> n;
    std::vector<double> log_direct, log_product, log_closed;
    double max_direct_over_product = -kInf;   // max of log_direct - log_product
    double max_product_over_closed = -kInf;   // max of log_product - log_closed
    double max_abs_log_det = 0.0;             // |log det T_n|, should be ~0
};

inline TransferChain transfer_chain(const ParameterModel& model, const EdgePoint& pt, std::int64_t n_from,
                                    std::int64_t n_to, bool keep_series = false) {
    const bool a_case = model.model_case() == ModelCase::a_case;
    const double x = a_case ? std::abs(pt.x) : pt.x;
    if (n_to <= n_from) throw DomainError("transfer_chain needs n_to > n_from");
    if (excess(model, pt, n_from) >= 0.0) throw DomainError("transfer_chain must start in the elliptic region");
    const double k_inf = kappa_infinity(pt);
    const double k_from = kappa_n(model, pt, n_from);
    const double a_from = model.a(n_from);
    const double log_closed = closed_transfer_bound(a_case, k_from, k_inf, a_from);
    TransferChain out;
    ScaledMat2 T;
    NeumaierSum prod;  // log of the running product of consecutive factors
    double k_prev = k_from;
    double log_Yinv_first = 0.0;
    for (std::int64_t n = n_from + 1; n <= n_to; ++n) {
        T.left_multiply(step_matrix_real(model, x, n));
        const double kn = kappa_n(model, pt, n);
        double log_product;
        if (!a_case) {
            // ||Y(k_n)|| ||Y(k_{from+1})^{-1}|| prod_{j=from+1}^{n-1} ||Y(k_{j+1})^{-1} Y(k_j)||
            if (n == n_from + 1)
                log_Yinv_first = std::log(kooman_factors(kn).Y_inv.norm());
            else
                prod.add(std::log(consecutive_norm(k_prev, kn)));
            log_product = std::log(kooman_factors(kn).Y.norm()) + log_Yinv_first + prod.value();
        } else {
            // 2/(a_from sin k_n) prod_{j=from}^{n-1} (1 + |sin(dk)| / (sin k_j cos k_j))
            prod.add(std::log1p(std::abs(std::sin(kn - k_prev)) / (std::sin(k_prev) * std::cos(k_prev))));
            log_product = kLn2 - std::log(a_from) - std::log(std::sin(kn)) + prod.value();
        }
        const double ld = T.log_norm();
        out.max_direct_over_product = std::max(out.max_direct_over_product, ld - log_product);
        out.max_product_over_closed = std::max(out.max_product_over_closed, log_product - log_closed);
        out.max_abs_log_det = std::max(out.max_abs_log_det, std::abs(T.log_abs_det()));
        if (keep_series) {
            out.n.push_back(n);
            out.log_direct.push_back(ld);
            out.log_product.push_back(log_product);
            out.log_closed.push_back(log_closed);
        }
        k_prev = kn;
    }
    return out;
}

// Closed (log) bound on sup_n ||T_n|| for the chain started at n_from, and the
// product bound at n_to for cross-checking.
struct EllipticBound {
    double log_closed = 0.0;
    double log_product_at_end = 0.0;
};

inline EllipticBound elliptic_norm_bound(const ParameterModel& model, const EdgePoint& pt, std::int64_t n_from,
                                         std::int64_t n_to) {
    const auto chain = transfer_chain(model, pt, n_from, n_to, true);
    return {chain.log_closed.back(), chain.log_product.back()};
}

// Envelope for w near the lower edge x -> -2 of a b-case model. With
// 2 cos(theta_n) = b_n - x, the phases decrease to theta_inf = arccos(-x/2)
// and every index is elliptic; the transfer matrix from 1 obeys
// ||T_n|| <= K = 2 ||Y(theta_2)^{-1}|| (theta_1/theta_inf) exp((theta_1 - theta_inf) e(theta_1)).
struct LowerEdgeEnvelope {
    double theta_1 = 0.0, theta_2 = 0.0, theta_inf = 0.0;
    double log_K = 0.0;
    double log_v1 = 0.0;    // log |(p_1, p_0)|
    double log_w_lower = 0.0;
    double log_w_upper = 0.0;
};

inline LowerEdgeEnvelope lower_edge_envelope(const ParameterModel& model, double x) {
    if (model.model_case() != ModelCase::b_case) throw DomainError("lower-edge envelope is for b-case models");
    if (!(x > -2.0 && x < 0.0)) throw DomainError("lower-edge envelope needs x in (-2, 0)");
    auto theta = [&](std::int64_t n) {
        const double s = 2.0 + x - model.b(n);  // 2 - (b_n - x)
        if (!(s > 0.0 && s < 4.0)) throw DomainError("lower-edge envelope: b_n - x outside (-2, 2)");
        return acos_deficit(s);
    };
    LowerEdgeEnvelope e;
    e.theta_1 = theta(1);
    e.theta_2 = theta(2);
    e.theta_inf = acos_deficit(2.0 + x);
    const double yinv = kooman_factors(e.theta_2).Y_inv.norm();
    e.log_K = kLn2 + std::log(yinv) + std::log(e.theta_1 / e.theta_inf) +
              (e.theta_1 - e.theta_inf) * e_of_y(e.theta_1);
    const double p1 = x - model.b(1);
    e.log_v1 = 0.5 * std::log(p1 * p1 + 1.0);
    // eta_n = |v_n|^2 with |v_n| within a factor K of |v_1|; w = 1/(pi eta).
    e.log_w_lower = -std::log(kPi) - 2.0 * (e.log_v1 + e.log_K);
    e.log_w_upper = -std::log(kPi) - 2.0 * (e.log_v1 - e.log_K);
    return e;
}

// Direct transfer norm from 1 to n (log), for cross-checking the lower-edge constant.
inline double lower_edge_direct_log_norm(const ParameterModel& model, double x, std::int64_t n) {
    ScaledMat2 T;
    for (std::int64_t k = 2; k <= n; ++k) T.left_multiply(step_matrix_real(model, x, k));
    return T.log_norm();
}

}  // namespace edgeweight
