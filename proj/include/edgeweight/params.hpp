#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "edgeweight/errors.hpp"
#include "edgeweight/numeric.hpp"

namespace edgeweight {

// ---------------------------------------------------------------------------
// MonotoneF: positive, decreasing, convex f on [log 2, inf) with f -> 0.
// ---------------------------------------------------------------------------
class MonotoneF {
public:
    enum class Family { power, iterated_log };

    // f(x) = (1 + x)^(-alpha)
    static MonotoneF power(double alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("power family needs alpha > 0");
        MonotoneF f;
        f.family_ = Family::power;
        f.alpha_ = alpha;
        return f;
    }

    // f(x) = 1 / log_k(x + c), where log_k is the k-fold logarithm and c is
    // the smallest offset keeping every intermediate log >= 1 on [log 2, inf),
    // optionally increased by extra_offset.
    static MonotoneF iterated_log(int depth, double extra_offset = 0.0) {
        if (depth < 1 || depth > 3) throw ConfigError("iterated-log depth must be 1, 2 or 3");
        if (!(extra_offset >= 0.0)) throw ConfigError("iterated-log offset must be >= 0");
        MonotoneF f;
        f.family_ = Family::iterated_log;
        f.depth_ = depth;
        double e = std::numbers::e;  // E_1 = e, E_k = exp(E_{k-1})
        for (int k = 2; k <= depth; ++k) e = std::exp(e);
        f.offset_ = e - kLn2 + extra_offset;
        return f;
    }

    [[nodiscard]] Family family() const { return family_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] double offset() const { return offset_; }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        if (family_ == Family::power)
            os << "power(alpha=" << alpha_ << ")";
        else
            os << "iterated-log(depth=" << depth_ << ", offset=" << offset_ << ")";
        return os.str();
    }

    [[nodiscard]] double operator()(double x) const { return value(x); }

    [[nodiscard]] double value(double x) const {
        if (family_ == Family::power) return std::pow(1.0 + x, -alpha_);
        return 1.0 / chain(x).back();
    }

    [[nodiscard]] double derivative(double x) const {
        if (family_ == Family::power) return -alpha_ * std::pow(1.0 + x, -alpha_ - 1.0);
        const auto [l, d1, d2] = chain_derivs(x);
        return -d1 / (l * l);
    }

    [[nodiscard]] double second_derivative(double x) const {
        if (family_ == Family::power)
            return alpha_ * (alpha_ + 1.0) * std::pow(1.0 + x, -alpha_ - 2.0);
        const auto [l, d1, d2] = chain_derivs(x);
        return -d2 / (l * l) + 2.0 * d1 * d1 / (l * l * l);
    }

    // f(x) - f(x + h) for h >= 0, free of cancellation.
    [[nodiscard]] double drop(double x, double h) const {
        if (h <= 0.0) return 0.0;
        if (family_ == Family::power)
            return -value(x) * std::expm1(-alpha_ * std::log1p(h / (1.0 + x)));
        const auto lx = chain(x);
        double inc = std::log1p(h / (x + offset_));  // L_1(x+h) - L_1(x)
        for (int j = 1; j < depth_; ++j) inc = std::log1p(inc / lx[j - 1]);
        const double lk = lx.back();
        return inc / (lk * (lk + inc));
    }

    // Solution x of f(x) = t for t in (0, f(0)]; +inf when x overflows.
    [[nodiscard]] double inverse(double t) const {
        if (!(t > 0.0)) throw DomainError("MonotoneF::inverse needs t > 0");
        if (family_ == Family::power) return std::pow(t, -1.0 / alpha_) - 1.0;
        double y = 1.0 / t;
        for (int j = 0; j < depth_; ++j) {
            y = std::exp(y);
            if (!std::isfinite(y)) return kInf;
        }
        return y - offset_;
    }

private:
    MonotoneF() = default;

    // L_1..L_k at x.
    [[nodiscard]] std::vector<double> chain(double x) const {
        std::vector<double> l(depth_);
        l[0] = std::log(x + offset_);
        for (int j = 1; j < depth_; ++j) l[j] = std::log(l[j - 1]);
        return l;
    }

    // (L_k, L_k', L_k'') at x.
    [[nodiscard]] std::tuple<double, double, double> chain_derivs(double x) const {
        const double u = x + offset_;
        double l = std::log(u), d1 = 1.0 / u, d2 = -1.0 / (u * u);
        for (int j = 1; j < depth_; ++j) {
            const double nl = std::log(l);
            const double nd1 = d1 / l;
            const double nd2 = (d2 * l - d1 * d1) / (l * l);
            l = nl;
            d1 = nd1;
            d2 = nd2;
        }
        return {l, d1, d2};
    }

    Family family_ = Family::power;
    double alpha_ = 1.0;
    int depth_ = 1;
    double offset_ = 0.0;
};

// ---------------------------------------------------------------------------
// Discrete parameter models.
// ---------------------------------------------------------------------------

// Which coefficient carries the approach to the free case.
enum class ModelCase {
    b_case,  // a_n = 1, b_n negative and increasing to 0
    a_case,  // b_n = 0, a_n below 1 and nondecreasing to 1
};

// How a custom sequence continues past its stored entries.
struct TailRule {
    enum class Kind { none, constant, power_fit };
    Kind kind = Kind::none;
    double a_value = 1.0;  // constant tail for a
    double b_value = 0.0;  // constant tail for b
};

class ParameterModel {
public:
    enum class Kind { power_law_b, log_law_a, custom };

    // a_n = 1, b_n = -C n^(-beta).
    static ParameterModel power_law_b(double C, double beta) {
        if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("power-law-b needs C > 0");
        if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("power-law-b needs beta in (0, 2)");
        ParameterModel m;
        m.kind_ = Kind::power_law_b;
        m.C_ = C;
        m.beta_ = beta;
        m.case_ = ModelCase::b_case;
        return m;
    }

    // b_n = 0, a_n = 1 - f(log(n + 1)).
    static ParameterModel log_law_a(const MonotoneF& f) {
        if (!(f.value(kLn2) < 1.0))
            throw ConfigError("log-law-a needs f(log 2) < 1 so that a_1 > 0 (got " + f.describe() + ")");
        ParameterModel m;
        m.kind_ = Kind::log_law_a;
        m.f_ = f;
        m.case_ = ModelCase::a_case;
        return m;
    }

    // Explicit a_1.., b_1.. with a tail rule. Empty a means a = 1, empty b means b = 0
    // on the stored range.
    static ParameterModel custom(std::vector<double> a, std::vector<double> b, TailRule tail) {
        ParameterModel m;
        m.kind_ = Kind::custom;
        m.a_seq_ = std::move(a);
        m.b_seq_ = std::move(b);
        m.tail_ = tail;
        for (double v : m.a_seq_)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("custom a_n must be positive and finite");
        for (double v : m.b_seq_)
            if (!std::isfinite(v)) throw ConfigError("custom b_n must be finite");
        if (tail.kind == TailRule::Kind::constant && !(tail.a_value > 0.0))
            throw ConfigError("constant tail for a must be positive");
        if (tail.kind == TailRule::Kind::power_fit) m.fit_tails();
        bool a_one = m.tail_a_is_one();
        for (double v : m.a_seq_) a_one = a_one && v == 1.0;
        m.case_ = a_one ? ModelCase::b_case : ModelCase::a_case;
        return m;
    }

    // a = 1, b = 0: the free Jacobi matrix.
    static ParameterModel free_case() {
        return custom({}, {}, TailRule{TailRule::Kind::constant, 1.0, 0.0});
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double C() const { return C_; }
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] const std::optional<MonotoneF>& f() const { return f_; }

    [[nodiscard]] bool is_free() const {
        return kind_ == Kind::custom && a_seq_.empty() && b_seq_.empty() &&
               tail_.kind == TailRule::Kind::constant && tail_.a_value == 1.0 && tail_.b_value == 0.0;
    }

    [[nodiscard]] ModelCase model_case() const { return case_; }

    // b_n, n >= 1.
    [[nodiscard]] double b(std::int64_t n) const {
        check_index(n);
        switch (kind_) {
            case Kind::power_law_b: return -C_ * std::pow(static_cast<double>(n), -beta_);
            case Kind::log_law_a: return 0.0;
            case Kind::custom: break;
        }
        if (static_cast<std::size_t>(n) <= b_seq_.size()) return b_seq_[n - 1];
        if (static_cast<std::size_t>(n) <= a_seq_.size() && b_seq_.empty()) return 0.0;
        switch (tail_.kind) {
            case TailRule::Kind::none:
                throw ModelError("b_" + std::to_string(n) + " is past the stored sequence and no tail rule was given");
            case TailRule::Kind::constant: return tail_.b_value;
            case TailRule::Kind::power_fit:
                return b_fit_.amp * std::pow(static_cast<double>(n) / b_fit_.n0, -b_fit_.exponent);
        }
        return 0.0;
    }

    // 1 - a_n, computed without cancellation where the model allows.
    [[nodiscard]] double a_deficit(std::int64_t n) const {
        check_index(n);
        switch (kind_) {
            case Kind::power_law_b: return 0.0;
            case Kind::log_law_a: return f_->value(std::log1p(static_cast<double>(n)));
            case Kind::custom: break;
        }
        if (static_cast<std::size_t>(n) <= a_seq_.size()) return 1.0 - a_seq_[n - 1];
        if (static_cast<std::size_t>(n) <= b_seq_.size() && a_seq_.empty()) return 0.0;
        switch (tail_.kind) {
            case TailRule::Kind::none:
                throw ModelError("a_" + std::to_string(n) + " is past the stored sequence and no tail rule was given");
            case TailRule::Kind::constant: return 1.0 - tail_.a_value;
            case TailRule::Kind::power_fit:
                return a_fit_.amp * std::pow(static_cast<double>(n) / a_fit_.n0, -a_fit_.exponent);
        }
        return 0.0;
    }

    // a_n, n >= 1.
    [[nodiscard]] double a(std::int64_t n) const {
        if (kind_ == Kind::power_law_b) {
            check_index(n);
            return 1.0;
        }
        if (kind_ == Kind::custom && static_cast<std::size_t>(n) <= a_seq_.size() && n >= 1)
            return a_seq_[n - 1];
        return 1.0 - a_deficit(n);
    }

    // b_{n+1} - b_n, free of cancellation for the power law.
    [[nodiscard]] double b_increment(std::int64_t n) const {
        if (kind_ == Kind::power_law_b) {
            const double nn = static_cast<double>(n);
            return -C_ * std::pow(nn, -beta_) * std::expm1(-beta_ * std::log1p(1.0 / nn));
        }
        return b(n + 1) - b(n);
    }

    // a_{n+1} - a_n, free of cancellation for the log law.
    [[nodiscard]] double a_increment(std::int64_t n) const {
        if (kind_ == Kind::log_law_a) {
            const double x = std::log1p(static_cast<double>(n));
            return f_->drop(x, std::log1p(1.0 / (static_cast<double>(n) + 1.0)));
        }
        return a_deficit(n) - a_deficit(n + 1);
    }

    // Largest index with stored data (0 for closed-form models).
    [[nodiscard]] std::size_t stored_length() const { return std::max(a_seq_.size(), b_seq_.size()); }
    [[nodiscard]] const TailRule& tail() const { return tail_; }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind_) {
            case Kind::power_law_b: os << "power-law-b(C=" << C_ << ", beta=" << beta_ << ")"; break;
            case Kind::log_law_a: os << "log-law-a(f=" << f_->describe() << ")"; break;
            case Kind::custom:
                os << (is_free() ? "free" : "custom") << "(len=" << stored_length() << ")";
                break;
        }
        return os.str();
    }

private:
    struct PowerFit {
        double amp = 0.0, n0 = 1.0, exponent = 0.0;
    };

    ParameterModel() = default;

    void check_index(std::int64_t n) const {
        if (n < 1) throw DomainError("parameter index must be >= 1, got " + std::to_string(n));
    }

    [[nodiscard]] bool tail_a_is_one() const {
        if (tail_.kind == TailRule::Kind::constant) return tail_.a_value == 1.0;
        if (tail_.kind == TailRule::Kind::power_fit) return a_fit_.amp == 0.0;
        return true;
    }

    // Fits d_n = amp (n/n0)^(-p) through the last two stored values of a
    // deviation sequence (b_n, or 1 - a_n). An all-zero deviation fits amp = 0.
    static PowerFit fit(const std::vector<double>& dev, const char* name) {
        PowerFit pf;
        const std::size_t L = dev.size();
        if (L == 0) return pf;
        if (L < 2) throw ConfigError(std::string("power-fit tail for ") + name + " needs at least two entries");
        const double d1 = dev[L - 2], d2 = dev[L - 1];
        if (d1 == 0.0 && d2 == 0.0) return pf;
        if (!(d1 * d2 > 0.0) || !(std::abs(d2) < std::abs(d1)))
            throw ConfigError(std::string("power-fit tail for ") + name +
                              " needs the last two deviations to share a sign and shrink");
        pf.amp = d2;
        pf.n0 = static_cast<double>(L);
        pf.exponent = std::log(d1 / d2) / std::log(static_cast<double>(L) / static_cast<double>(L - 1));
        return pf;
    }

    void fit_tails() {
        std::vector<double> adev(a_seq_.size());
        for (std::size_t i = 0; i < a_seq_.size(); ++i) adev[i] = 1.0 - a_seq_[i];
        a_fit_ = fit(adev, "a");
        b_fit_ = fit(b_seq_, "b");
    }

    Kind kind_ = Kind::custom;
    ModelCase case_ = ModelCase::b_case;
    double C_ = 0.0;
    double beta_ = 0.0;
    std::optional<MonotoneF> f_;
    std::vector<double> a_seq_, b_seq_;
    TailRule tail_;
    PowerFit a_fit_, b_fit_;
};

// Dense copy of (a_n, 1 - a_n, b_n) for n = 1..n_max, for inner loops that
// revisit the same indices many times.
class ParameterTable {
public:
    ParameterTable(const ParameterModel& model, std::int64_t n_max) : n_max_(n_max) {
        if (n_max < 1) throw DomainError("ParameterTable needs n_max >= 1");
        a_.resize(n_max + 1);
        b_.resize(n_max + 1);
        a_[0] = 1.0;
        b_[0] = 0.0;
        for (std::int64_t n = 1; n <= n_max; ++n) {
            a_[n] = model.a(n);
            b_[n] = model.b(n);
        }
    }
    [[nodiscard]] std::int64_t size() const { return n_max_; }
    [[nodiscard]] double a(std::int64_t n) const { return a_[n]; }
    [[nodiscard]] double b(std::int64_t n) const { return b_[n]; }

private:
    std::int64_t n_max_;
    std::vector<double> a_, b_;
};

// ---------------------------------------------------------------------------
// Monotonicity validation.
// ---------------------------------------------------------------------------
struct ValidationReport {
    std::int64_t horizon = 0;
    bool a_nondecreasing = true;
    bool b_increasing = true;     // strictly, unless b is identically zero
    bool a_at_most_one = true;
    bool b_nonpositive = true;
    bool a_tends_to_one = true;   // |1 - a_n| shrinking over the second half of the horizon
    bool b_tends_to_zero = true;  // |b_n| shrinking over the second half of the horizon
    double bv_partial = 0.0;      // sum_{n<H} |a_{n+1}-a_n| + |b_{n+1}-b_n|
    std::int64_t first_a_violation = 0;
    std::int64_t first_b_violation = 0;
    std::string note;
    std::vector<std::string> failures;

    [[nodiscard]] bool monotone_a() const { return a_nondecreasing && a_at_most_one; }
    [[nodiscard]] bool monotone_b() const { return b_increasing && b_nonpositive; }
    [[nodiscard]] bool ok() const { return failures.empty(); }
};

inline ValidationReport validate_monotone(const ParameterModel& model, std::int64_t horizon) {
    if (horizon < 2) throw DomainError("validate_monotone needs horizon >= 2");
    ValidationReport r;
    r.horizon = horizon;
    NeumaierSum bv;
    bool b_all_zero = true;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const double an = model.a(n), bn = model.b(n);
        if (bn != 0.0) b_all_zero = false;
        if (an > 1.0) r.a_at_most_one = false;
        if (bn > 0.0) r.b_nonpositive = false;
        if (n == horizon) break;
        const double an1 = model.a(n + 1), bn1 = model.b(n + 1);
        if (an1 < an && r.a_nondecreasing) {
            r.a_nondecreasing = false;
            r.first_a_violation = n;
        }
        if (!(bn1 > bn) && r.b_increasing) {
            r.b_increasing = false;
            r.first_b_violation = n;
        }
        bv.add(std::abs(an1 - an));
        bv.add(std::abs(bn1 - bn));
    }
    if (b_all_zero) {
        r.b_increasing = true;
        r.first_b_violation = 0;
    }
    r.bv_partial = bv.value();
    const std::int64_t mid = std::max<std::int64_t>(1, horizon / 2);
    const double da_mid = std::abs(model.a_deficit(mid)), da_end = std::abs(model.a_deficit(horizon));
    const double b_mid = std::abs(model.b(mid)), b_end = std::abs(model.b(horizon));
    r.a_tends_to_one = da_end == 0.0 || da_end < da_mid;
    r.b_tends_to_zero = b_end == 0.0 || b_end < b_mid;

    const ModelCase mc = model.model_case();
    if (mc == ModelCase::b_case) {
        if (!r.monotone_b()) r.failures.push_back("b_n is not negative and strictly increasing");
        if (!r.b_tends_to_zero) r.failures.push_back("b_n does not appear to tend to 0");
    } else {
        if (!r.monotone_a()) r.failures.push_back("a_n is not nondecreasing and bounded by 1");
        if (!r.a_tends_to_one) r.failures.push_back("a_n does not appear to tend to 1");
        if (!b_all_zero) r.failures.push_back("a-case models need b_n = 0");
        r.note =
            "a-case hypothesis is taken as a_n <= a_{n+1} <= 1 (the direction every estimate uses); "
            "a nonincreasing a_n would be reported as a failure";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Continuum potentials.
// ---------------------------------------------------------------------------
class PotentialModel {
public:
    enum class Kind { power_law, shifted_power_law, custom };

    // V(x) = C0 x^(-beta); V(0) is infinite.
    static PotentialModel power_law(double C0, double beta) {
        auto p = shifted_power_law(C0, beta, 0.0);
        p.kind_ = Kind::power_law;
        return p;
    }

    // V(x) = C0 (x + x0)^(-beta).
    static PotentialModel shifted_power_law(double C0, double beta, double x0) {
        if (!(C0 > 0.0) || !std::isfinite(C0)) throw ConfigError("potential needs C0 > 0");
        if (!(beta > 0.0 && beta < 2.0)) throw ConfigError("potential needs beta in (0, 2)");
        if (!(x0 >= 0.0) || !std::isfinite(x0)) throw ConfigError("potential needs x0 >= 0");
        PotentialModel p;
        p.kind_ = x0 > 0.0 ? Kind::shifted_power_law : Kind::power_law;
        p.C0_ = C0;
        p.beta_ = beta;
        p.x0_ = x0;
        return p;
    }

    // User-supplied V and V'; the inverse is found by bisection unless given.
    static PotentialModel custom(std::function<double(double)> V, std::function<double(double)> dV,
                                 std::function<double(double)> V_inv = {}) {
        if (!V || !dV) throw ConfigError("custom potential needs V and V'");
        PotentialModel p;
        p.kind_ = Kind::custom;
        p.V_ = std::move(V);
        p.dV_ = std::move(dV);
        p.Vinv_ = std::move(V_inv);
        return p;
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double C0() const { return C0_; }
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] double x0() const { return x0_; }

    [[nodiscard]] double V(double x) const {
        if (kind_ == Kind::custom) return V_(x);
        return C0_ * std::pow(x + x0_, -beta_);
    }

    [[nodiscard]] double dV(double x) const {
        if (kind_ == Kind::custom) return dV_(x);
        return -beta_ * C0_ * std::pow(x + x0_, -beta_ - 1.0);
    }

    // V(x) - V(x + h) for h >= 0, free of cancellation for power laws.
    [[nodiscard]] double drop(double x, double h) const {
        if (kind_ == Kind::custom) return V(x) - V(x + h);
        return -V(x) * std::expm1(-beta_ * std::log1p(h / (x + x0_)));
    }

    [[nodiscard]] double V0() const { return V(0.0); }

    // The x >= 0 with V(x) = E; 0 when E >= V(0).
    [[nodiscard]] double inverse(double E) const {
        if (!(E > 0.0)) throw DomainError("V^{-1}(E) needs E > 0");
        if (kind_ != Kind::custom) return std::max(0.0, std::pow(E / C0_, -1.0 / beta_) - x0_);
        if (Vinv_) return Vinv_(E);
        if (E >= V(0.0)) return 0.0;
        double lo = 0.0, hi = 1.0;
        while (V(hi) > E) {
            hi *= 2.0;
            if (hi > 1e300) throw NumericalError("custom potential never drops below E");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (V(mid) > E ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        if (kind_ == Kind::custom)
            os << "custom";
        else
            os << "power(C0=" << C0_ << ", beta=" << beta_ << ", x0=" << x0_ << ")";
        return os.str();
    }

private:
    PotentialModel() = default;
    Kind kind_ = Kind::power_law;
    double C0_ = 1.0, beta_ = 1.0, x0_ = 0.0;
    std::function<double(double)> V_, dV_, Vinv_;
};

// Checks positivity, strict decrease and round-trip of the inverse on a grid.
struct PotentialReport {
    bool positive = true;
    bool decreasing = true;
    double max_roundtrip_error = 0.0;
    [[nodiscard]] bool ok() const { return positive && decreasing && max_roundtrip_error <= 1e-10; }
};

inline PotentialReport validate_potential(const PotentialModel& p, double x_max = 1e3, int samples = 200) {
    PotentialReport r;
    for (int i = 0; i <= samples; ++i) {
        const double x = (i == 0 ? 1e-3 : x_max * std::pow(double(i) / samples, 2.0));
        const double v = p.V(x);
        if (!(v > 0.0)) r.positive = false;
        if (!(p.dV(x) < 0.0)) r.decreasing = false;
        const double back = p.inverse(v);
        r.max_roundtrip_error = std::max(r.max_roundtrip_error, rel_diff(back, x));
    }
    return r;
}

// ---------------------------------------------------------------------------
// key=value configuration.
// ---------------------------------------------------------------------------
using KeyValues = std::map<std::string, std::string>;

// Parses "key = value" lines; '#' starts a comment.
inline KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline KeyValues parse_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_key_values(in);
}

inline double kv_number(const KeyValues& kv, const std::string& key, std::optional<double> fallback = {}) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ConfigError("missing config key '" + key + "'");
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
}

inline std::vector<double> kv_list(const KeyValues& kv, const std::string& key) {
    std::vector<double> out;
    const auto it = kv.find(key);
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' has a non-numeric entry: " + item);
        }
    }
    return out;
}

// Builds a discrete model from keys: kind (power-law-b | log-law-a | custom | free),
// C, beta, family (power | iterated-log), alpha, depth, offset (default 1, so that
// a_1 > 0), a, b,
// tail (none | constant | power-fit), tail_a, tail_b.
inline ParameterModel model_from_config(const KeyValues& kv) {
    const auto kind_it = kv.find("kind");
    const std::string kind = kind_it == kv.end() ? "power-law-b" : kind_it->second;
    if (kind == "power-law-b") return ParameterModel::power_law_b(kv_number(kv, "C", 1.0), kv_number(kv, "beta", 0.5));
    if (kind == "free") return ParameterModel::free_case();
    if (kind == "log-law-a") {
        const auto fam_it = kv.find("family");
        const std::string fam = fam_it == kv.end() ? "power" : fam_it->second;
        if (fam == "power") return ParameterModel::log_law_a(MonotoneF::power(kv_number(kv, "alpha", 1.0)));
        if (fam == "iterated-log")
            return ParameterModel::log_law_a(MonotoneF::iterated_log(static_cast<int>(kv_number(kv, "depth", 2.0)),
                                                                     kv_number(kv, "offset", 1.0)));
        throw ConfigError("unknown f family '" + fam + "'");
    }
    if (kind == "custom") {
        TailRule tail;
        const auto t_it = kv.find("tail");
        const std::string t = t_it == kv.end() ? "none" : t_it->second;
        if (t == "none")
            tail.kind = TailRule::Kind::none;
        else if (t == "constant") {
            tail.kind = TailRule::Kind::constant;
            tail.a_value = kv_number(kv, "tail_a", 1.0);
            tail.b_value = kv_number(kv, "tail_b", 0.0);
        } else if (t == "power-fit")
            tail.kind = TailRule::Kind::power_fit;
        else
            throw ConfigError("unknown tail rule '" + t + "'");
        return ParameterModel::custom(kv_list(kv, "a"), kv_list(kv, "b"), tail);
    }
    throw ConfigError("unknown model kind '" + kind + "'");
}

// Builds a potential from keys C0, beta, x0.
inline PotentialModel potential_from_config(const KeyValues& kv) {
    return PotentialModel::shifted_power_law(kv_number(kv, "C0", 1.0), kv_number(kv, "beta", 1.0),
                                             kv_number(kv, "x0", 0.0));
}

}  // namespace edgeweight
