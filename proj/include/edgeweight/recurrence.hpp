#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"
#include "edgeweight/params.hpp"
#include "edgeweight/phase.hpp"

namespace edgeweight {

// (p_n, p_{n-1}) stored as mantissas times 2^exp2. Renormalization is an
// exact power-of-two rescale, so ratios of mantissas never change and
// differences of exponents are exact integers.
struct LogScaledPair {
    std::int64_t n = 0;
    std::int64_t exp2 = 0;
    double u0 = 1.0;  // p_n / 2^exp2
    double u1 = 0.0;  // p_{n-1} / 2^exp2

    [[nodiscard]] double log_scale() const { return static_cast<double>(exp2) * kLn2; }
    // Values of p_n, p_{n-1}; overflow to inf is possible for large log_scale.
    [[nodiscard]] double p() const { return std::ldexp(u0, static_cast<int>(exp2)); }
    [[nodiscard]] double p_prev() const { return std::ldexp(u1, static_cast<int>(exp2)); }
    [[nodiscard]] double log_abs_p() const { return log_scale() + std::log(std::abs(u0)); }

    void renormalize() {
        const double m = std::max(std::abs(u0), std::abs(u1));
        if (m >= 0.5 && m <= 2.0) return;
        if (m == 0.0 || !std::isfinite(m)) throw NumericalError("LogScaledPair: degenerate or non-finite state");
        int e = 0;
        std::frexp(m, &e);  // m = f 2^e, f in [1/2, 1)
        u0 = std::ldexp(u0, -e);
        u1 = std::ldexp(u1, -e);
        exp2 += e;
    }

    static LogScaledPair initial() { return {}; }
};

// Advances (p_n, p_{n-1}) to (p_{n+1}, p_n) using
// a_{n+1} p_{n+1} = (x - b_{n+1}) p_n - a_n p_{n-1}.
// Params is ParameterModel or ParameterTable (anything with a(n), b(n)).
template <class Params>
LogScaledPair step_p(const Params& model, double x, LogScaledPair s) {
    const std::int64_t n = s.n;
    const double an = n >= 1 ? model.a(n) : 1.0;
    const double an1 = model.a(n + 1);
    const double next = ((x - model.b(n + 1)) * s.u0 - an * s.u1) / an1;
    if (!std::isfinite(next)) throw NumericalError("step_p: non-finite value at n=" + std::to_string(n + 1));
    s.u1 = s.u0;
    s.u0 = next;
    s.n = n + 1;
    s.renormalize();
    return s;
}

// Runs the recurrence from n = 0 up to index n.
template <class Params>
LogScaledPair advance_to(const Params& model, double x, std::int64_t n, LogScaledPair s = LogScaledPair::initial()) {
    while (s.n < n) s = step_p(model, x, s);
    return s;
}

// log(a_n^2 p_n^2 + p_{n-1}^2) from a state at index n >= 1.
template <class Params>
double log_eta(const Params& model, const LogScaledPair& s) {
    const double an = model.a(s.n);
    const double q = an * an * s.u0 * s.u0 + s.u1 * s.u1;
    return 2.0 * s.log_scale() + std::log(q);
}

// log eta_n(x) evaluated from scratch.
template <class Params>
double eta_n(const Params& model, double x, std::int64_t n) {
    if (n < 1) throw DomainError("eta_n needs n >= 1");
    return log_eta(model, advance_to(model, x, n));
}

// psi_n = exp(-sum_{j<=n} gamma_j) p_n and the auxiliary W_n, computed by
// their own recursion on the hyperbolic side.
struct PsiSequence {
    std::vector<double> psi;    // psi_0 .. psi_N
    std::vector<double> W;      // W_0 .. W_{N-1}
    std::vector<double> gamma;  // gamma_1 .. gamma_N at index 1..N (index 0 unused)
    std::vector<double> log_ratio;  // log(a_n / a_{n+1}) at index n, 1..N-1
};

inline PsiSequence psi_sequence(const ParameterModel& model, const EdgePoint& pt, std::int64_t N) {
    if (N < 0) throw DomainError("psi_sequence needs N >= 0");
    PsiSequence out;
    out.gamma.assign(N + 1, 0.0);
    for (std::int64_t n = 1; n <= N; ++n) {
        const double e = excess(model, pt, n);
        if (e < 0.0)
            throw DomainError("psi_sequence: index " + std::to_string(n) + " is beyond the turning point");
        out.gamma[n] = gamma_from_excess(e);
    }
    out.log_ratio.assign(N + 1, 0.0);
    for (std::int64_t n = 1; n + 1 <= N; ++n)
        out.log_ratio[n] = std::log1p(-model.a_increment(n) / model.a(n + 1));  // a_n/a_{n+1}
    out.psi.assign(N + 1, 0.0);
    out.psi[0] = 1.0;
    double prev = 0.0;  // psi_{-1}
    for (std::int64_t n = 0; n < N; ++n) {
        const double g1 = out.gamma[n + 1];
        const double back = n >= 1 ? std::exp(out.log_ratio[n] - out.gamma[n] - g1) * prev : 0.0;
        out.psi[n + 1] = (1.0 + std::exp(-2.0 * g1)) * out.psi[n] - back;
        prev = out.psi[n];
    }
    out.W.assign(N, 0.0);
    for (std::int64_t n = 0; n < N; ++n) {
        const double back = n >= 1 ? std::exp(out.log_ratio[n] - out.gamma[n]) * out.psi[n - 1] : 0.0;
        out.W[n] = std::exp(out.gamma[n + 1]) * out.psi[n] - back;
    }
    return out;
}

// One step of the elliptic-side phase variable Phi_n = p_n - exp(-i kappa_n) p_{n-1}.
struct PhiStep {
    std::int64_t n = 0;       // step from n to n+1
    double log_abs_phi = 0;   // log |Phi_n|
    double ratio = 1.0;       // |Phi_{n+1}| / |Phi_n|
    double radius = 0.0;      // r_n
    double violation = 0.0;   // distance of ratio outside [1 - r_n, 1 + r_n], 0 if inside
};

struct PhiTrajectory {
    std::vector<PhiStep> steps;
    double max_violation = 0.0;
};

// |Phi_n| for n_start <= n <= n_end and the per-step ratio radius
// r_n = |dkappa| / sin(kappa_n) (b-case) or |dkappa| / (sin(2 kappa_n)/2) (a-case).
inline PhiTrajectory phi_trajectory(const ParameterModel& model, const EdgePoint& pt, std::int64_t n_start,
                                    std::int64_t n_end) {
    if (n_start < 1 || n_end <= n_start) throw DomainError("phi_trajectory needs 1 <= n_start < n_end");
    const bool a_case = model.model_case() == ModelCase::a_case;
    const double x = a_case ? std::abs(pt.x) : pt.x;
    auto kappa = [&](std::int64_t n) {
        const double e = excess(model, pt, n);
        if (e >= 0.0) throw DomainError("phi_trajectory: index " + std::to_string(n) + " is not elliptic");
        return kappa_from_excess(e);
    };
    PhiTrajectory out;
    LogScaledPair s = advance_to(model, x, n_start);
    double k = kappa(n_start);
    auto phi = [](const LogScaledPair& st, double kap) {
        return std::complex<double>(st.u0, 0.0) - std::polar(1.0, -kap) * st.u1;
    };
    std::complex<double> ph = phi(s, k);
    out.steps.reserve(static_cast<std::size_t>(n_end - n_start));
    for (std::int64_t n = n_start; n < n_end; ++n) {
        const LogScaledPair s1 = step_p(model, x, s);
        const double k1 = kappa(n + 1);
        const std::complex<double> ph1 = phi(s1, k1);
        PhiStep st;
        st.n = n;
        st.log_abs_phi = s.log_scale() + std::log(std::abs(ph));
        st.ratio = std::ldexp(std::abs(ph1) / std::abs(ph), static_cast<int>(s1.exp2 - s.exp2));
        const double dk = std::abs(k1 - k);
        st.radius = a_case ? dk / (0.5 * std::sin(2.0 * k)) : dk / std::sin(k);
        st.violation = std::max({0.0, st.ratio - (1.0 + st.radius), (1.0 - st.radius) - st.ratio});
        out.max_violation = std::max(out.max_violation, st.violation);
        out.steps.push_back(st);
        s = s1;
        k = k1;
        ph = ph1;
    }
    return out;
}

}  // namespace edgeweight
