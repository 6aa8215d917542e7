#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"

namespace edgeweight::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

// Double-exponential (tanh-sinh) rule on [a, b]. Endpoint singularities of
// algebraic type are integrated without special handling. The integrand is
// called as f(x, x - a, b - x); the distance to the nearer endpoint is exact
// to working precision, so integrands can avoid cancellation there.
template <class F>
Result tanh_sinh(const F& f, double a, double b, double rel_tol = 1e-12, int max_level = 8) {
    if (!(b > a)) throw DomainError("tanh_sinh: empty interval");
    constexpr double kTMax = 5.0;
    const double len = b - a;
    Result res;
    auto node = [&](double t) {
        const double s = 0.5 * kPi * std::sinh(std::abs(t));
        const double q = std::exp(-2.0 * s);
        const double d = len * q / (1.0 + q);
        const double w = len * 0.5 * kPi * std::cosh(t) * 4.0 * q / ((1.0 + q) * (1.0 + q)) * 0.5;
        if (d <= 0.0 || w == 0.0) return 0.0;
        const double x = t < 0 ? a + d : b - d;
        const double dl = t < 0 ? d : len - d;
        const double dr = t < 0 ? len - d : d;
        ++res.evaluations;
        const double v = f(x, dl, dr);
        if (!std::isfinite(v)) throw NumericalError("tanh_sinh: non-finite integrand");
        return w * v;
    };
    double h = 1.0;
    NeumaierSum s;
    s.add(node(0.0));
    for (int j = 1; j * h <= kTMax; ++j) {
        s.add(node(j * h));
        s.add(node(-j * h));
    }
    double prev = s.value() * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (int j = 1; j * h <= kTMax; j += 2) {
            s.add(node(j * h));
            s.add(node(-j * h));
        }
        const double cur = s.value() * h;
        res.value = cur;
        res.error = std::abs(cur - prev);
        if (level >= 3 && res.error <= rel_tol * std::abs(cur)) return res;
        prev = cur;
    }
    return res;
}

namespace detail {
// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Abscissas of a panel, index 0..14 (7 is the center).
inline std::array<double, 15> panel_nodes(double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    std::array<double, 15> x{};
    for (int i = 0; i < 7; ++i) {
        x[i] = c - hw * kXgk[i];
        x[14 - i] = c + hw * kXgk[i];
    }
    x[7] = c;
    return x;
}

struct LogPanel {
    double a, b;
    double log_value;  // log of the Kronrod estimate
    double log_error;  // log of |Kronrod - Gauss|
    bool operator<(const LogPanel& o) const { return log_error < o.log_error; }
};

inline LogPanel make_log_panel(double a, double b, const std::array<double, 15>& lv) {
    double m = -kInf;
    for (double v : lv) m = std::max(m, v);
    const double hw = 0.5 * (b - a);
    if (m == -kInf) return {a, b, -kInf, -kInf};
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double s = std::exp(lv[i] - m) + std::exp(lv[14 - i] - m);
        k += kWgk[i] * s;
        if (i % 2 == 1) g += kWg[i / 2] * s;
    }
    const double ec = std::exp(lv[7] - m);
    k += kWgk[7] * ec;
    g += kWg[3] * ec;
    const double diff = std::abs(k - g);
    return {a, b, m + std::log(hw * k), diff > 0 ? m + std::log(hw * diff) : -kInf};
}
}  // namespace detail

struct LogResult {
    double log_value = -kInf;
    double rel_error = 0.0;
    int panels = 0;
    int evaluations = 0;
};

// Fills log f at the 15 nodes of one panel.
using LogBatch = std::function<void(const std::array<double, 15>&, std::array<double, 15>&)>;

// Globally adaptive Gauss-Kronrod integration of a positive integrand given
// by its logarithm, combined with log-sum-exp so values far outside double
// range are fine. Each round splits the (up to) eight worst panels and
// evaluates the children concurrently; the round size is fixed, so the
// result does not depend on the thread count.
inline LogResult integrate_log_batch(const LogBatch& log_f, double a, double b, double rel_tol = 1e-3,
                                     int initial_panels = 8, int max_panels = 4000, unsigned threads = 1) {
    if (!(b > a)) throw DomainError("integrate_log: empty interval");
    constexpr std::size_t kRound = 8;
    LogResult res;
    auto eval_many = [&](const std::vector<std::pair<double, double>>& spans) {
        std::vector<detail::LogPanel> out(spans.size());
        parallel_for(
            spans.size(),
            [&](std::size_t i) {
                const auto x = detail::panel_nodes(spans[i].first, spans[i].second);
                std::array<double, 15> lv{};
                log_f(x, lv);
                for (double v : lv)
                    if (std::isnan(v) || v == kInf) throw NumericalError("integrate_log: invalid integrand");
                out[i] = detail::make_log_panel(spans[i].first, spans[i].second, lv);
            },
            threads);
        res.evaluations += static_cast<int>(15 * spans.size());
        return out;
    };
    initial_panels = std::max(1, initial_panels);
    std::vector<std::pair<double, double>> spans;
    for (int i = 0; i < initial_panels; ++i) {
        const double pa = a + (b - a) * i / initial_panels;
        const double pb = i + 1 == initial_panels ? b : a + (b - a) * (i + 1) / initial_panels;
        spans.emplace_back(pa, pb);
    }
    std::vector<detail::LogPanel> panels = eval_many(spans);
    auto totals = [&](double& lv, double& le) {
        std::vector<double> v, e;
        v.reserve(panels.size());
        e.reserve(panels.size());
        for (const auto& p : panels) {
            v.push_back(p.log_value);
            e.push_back(p.log_error);
        }
        lv = log_sum_exp(v);
        le = log_sum_exp(e);
    };
    double lv = -kInf, le = -kInf;
    totals(lv, le);
    while (static_cast<int>(panels.size()) < max_panels) {
        if (lv == -kInf || le - lv <= std::log(rel_tol)) break;
        // Worst panels first; ties broken by position for reproducibility.
        std::sort(panels.begin(), panels.end(), [](const auto& p, const auto& q) {
            return p.log_error != q.log_error ? p.log_error > q.log_error : p.a < q.a;
        });
        const std::size_t take = std::min<std::size_t>(
            {kRound, panels.size(), static_cast<std::size_t>(max_panels) - panels.size()});
        spans.clear();
        for (std::size_t i = 0; i < take; ++i) {
            const double mid = 0.5 * (panels[i].a + panels[i].b);
            spans.emplace_back(panels[i].a, mid);
            spans.emplace_back(mid, panels[i].b);
        }
        panels.erase(panels.begin(), panels.begin() + static_cast<std::ptrdiff_t>(take));
        const auto children = eval_many(spans);
        panels.insert(panels.end(), children.begin(), children.end());
        totals(lv, le);
    }
    res.log_value = lv;
    res.rel_error = lv == -kInf ? 0.0 : std::exp(le - lv);
    res.panels = static_cast<int>(panels.size());
    return res;
}

// Scalar form of integrate_log_batch.
inline LogResult integrate_log(const std::function<double(double)>& log_f, double a, double b,
                               double rel_tol = 1e-3, int initial_panels = 8, int max_panels = 4000,
                               unsigned threads = 1) {
    return integrate_log_batch(
        [&](const std::array<double, 15>& x, std::array<double, 15>& lv) {
            for (int i = 0; i < 15; ++i) lv[i] = log_f(x[i]);
        },
        a, b, rel_tol, initial_panels, max_panels, threads);
}

// Globally adaptive Gauss-Kronrod for ordinary real integrands.
template <class F>
Result gauss_kronrod(const F& f, double a, double b, double abs_tol = 1e-13,
                     double rel_tol = 1e-12, int max_panels = 2000) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    Result res;
    auto eval = [&](double pa, double pb) {
        const auto x = detail::panel_nodes(pa, pb);
        std::array<double, 15> v{};
        for (int i = 0; i < 15; ++i) v[i] = f(x[i]);
        res.evaluations += 15;
        double k = detail::kWgk[7] * v[7], g = detail::kWg[3] * v[7];
        for (int i = 0; i < 7; ++i) {
            const double s = v[i] + v[14 - i];
            k += detail::kWgk[i] * s;
            if (i % 2 == 1) g += detail::kWg[i / 2] * s;
        }
        const double hw = 0.5 * (pb - pa);
        return Panel{pa, pb, hw * k, std::abs(hw * (k - g))};
    };
    std::priority_queue<Panel> queue;
    queue.push(eval(a, b));
    double total = queue.top().value, err = queue.top().error;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
           static_cast<int>(queue.size()) < max_panels) {
        const Panel p = queue.top();
        queue.pop();
        const double mid = 0.5 * (p.a + p.b);
        const Panel l = eval(p.a, mid), r = eval(mid, p.b);
        queue.push(l);
        queue.push(r);
        NeumaierSum tv, te;
        auto copy = queue;
        while (!copy.empty()) {
            tv.add(copy.top().value);
            te.add(copy.top().error);
            copy.pop();
        }
        total = tv.value();
        err = te.value();
    }
    if (!std::isfinite(total)) throw NumericalError("gauss_kronrod: non-finite result");
    res.value = total;
    res.error = err;
    return res;
}

}  // namespace edgeweight::quad
