#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

namespace edgeweight {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;

// Compensated (Neumaier) summation.
class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    NeumaierSum& operator+=(double v) {
        add(v);
        return *this;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log(e^a + e^b) without overflow.
inline double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log of sum of exp(values); -inf for an empty or all -inf input.
inline double log_sum_exp(const std::vector<double>& values) {
    double m = -kInf;
    for (double v : values) m = std::max(m, v);
    if (m == -kInf || !std::isfinite(m)) return m;
    NeumaierSum s;
    for (double v : values) s.add(std::exp(v - m));
    return m + std::log(s.value());
}

// Number of worker threads used when the caller passes 0.
inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Runs fn(i) for i in [0, count). Each index is processed exactly once;
// callers write results into slot i so output order never depends on
// scheduling. Exceptions are rethrown for the lowest failing index.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Deterministic sum of term(n) for n in [first, last]. Terms are grouped in
// fixed-size chunks, each chunk summed with compensation, and chunk totals
// combined in index order, so the result is independent of thread count.
template <class Term>
double chunked_sum(std::uint64_t first, std::uint64_t last, const Term& term, unsigned threads = 0) {
    if (last < first) return 0.0;
    constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;
    const std::uint64_t total = last - first + 1;
    const std::size_t chunks = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
    std::vector<double> partial(chunks, 0.0);
    parallel_for(
        chunks,
        [&](std::size_t c) {
            const std::uint64_t lo = first + c * kChunk;
            const std::uint64_t hi = std::min(last, lo + kChunk - 1);
            NeumaierSum s;
            for (std::uint64_t n = lo; n <= hi; ++n) s.add(term(n));
            partial[c] = s.value();
        },
        threads);
    NeumaierSum s;
    for (double p : partial) s.add(p);
    return s.value();
}

// arccosh(1 + y) for y >= 0, accurate for small y.
inline double acosh1p(double y) {
    if (y <= 0.0) return 0.0;
    return std::log1p(y + std::sqrt(y * (y + 2.0)));
}

// The angle k in [0, pi] with 2 cos k = 2 - s, i.e. 2 asin(sqrt(s)/2), for s in [0, 4].
inline double acos_deficit(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 4.0) return kPi;
    return 2.0 * std::asin(0.5 * std::sqrt(s));
}

// Relative difference |a-b| / max(|a|,|b|, tiny).
inline double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace edgeweight
