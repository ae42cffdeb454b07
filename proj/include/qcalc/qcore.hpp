#pragma once

// q-numbers, q/(p,q)-factorials, moment sequences and their weight
// functions. Everything factorial-like is carried in the log domain;
// linear values are materialized only on request since [n]_{p,q}!
// leaves binary64 range near n ~ 40 already for q = 2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcalc/report.hpp"

namespace qcalc {

enum class FactorialMode { linear, log };

/// Validated parameter bundle for the single-q and (p,q) settings.
struct QParams {
    double q = 0.0;
    std::optional<double> p;

    static QParams single(double q) {
        if (!(q > 1.0)) throw std::invalid_argument("QParams: q > 1 required");
        QParams out;
        out.q = q;
        return out;
    }

    static QParams pair(double p, double q) {
        if (!(p >= 0.0)) throw std::invalid_argument("QParams: p >= 0 required");
        if (!(p != q)) throw std::invalid_argument("QParams: p != q required");
        if (!(q > 0.0)) throw std::invalid_argument("QParams: q > 0 required");
        QParams out;
        out.q = q;
        out.p = p;
        return out;
    }

    bool is_pair() const { return p.has_value(); }

    /// The kernel construction additionally needs p > q > 1.
    void require_kernel_order() const {
        if (!p || !(*p > q) || !(q > 1.0))
            throw std::invalid_argument("QParams: kernel construction requires p > q > 1");
    }
};

/// [n]_q = (q^n - 1)/(q - 1); exact 0 for n = 0.
inline double q_number(int n, double q) {
    if (n < 0) throw std::invalid_argument("q_number: n >= 0 required");
    if (!(q > 0.0) || q == 1.0)
        throw std::domain_error("q_number: q > 0, q != 1 required (use the classical limit n at q = 1)");
    if (n == 0) return 0.0;
    if (n == 1) return 1.0;
    return std::expm1(static_cast<double>(n) * std::log(q)) / (q - 1.0);
}

inline double log_q_number(int n, double q) { return std::log(q_number(n, q)); }

/// log [n]_q! = sum_{j<=n} log [j]_q.
inline double log_q_factorial(int n, double q) {
    if (n < 0) throw std::invalid_argument("q_factorial: n >= 0 required");
    if (!(q > 1.0)) throw std::domain_error("q_factorial: q > 1 required");
    double s = 0.0;
    for (int j = 2; j <= n; ++j) s += log_q_number(j, q);
    return s;
}

inline double q_factorial(int n, double q, FactorialMode mode = FactorialMode::linear) {
    const double lg = log_q_factorial(n, q);
    if (mode == FactorialMode::log) return lg;
    if (lg > 708.0) throw std::overflow_error("q_factorial: linear value overflows, use log mode");
    double r = 1.0;
    for (int j = 2; j <= n; ++j) r *= q_number(j, q);
    return r;
}

/// [n]_{p,q} = (p^n - q^n)/(p - q); symmetric in p and q.
inline double pq_number(int n, double p, double q) {
    if (n < 0) throw std::invalid_argument("pq_number: n >= 0 required");
    if (p == q) throw std::domain_error("pq_number: p != q required");
    if (n == 0) return 0.0;
    if (n == 1) return 1.0;
    return (std::pow(p, n) - std::pow(q, n)) / (p - q);
}

/// log [n]_{p,q}, stable for large n (works off the dominant base).
inline double log_pq_number(int n, double p, double q) {
    if (n < 0) throw std::invalid_argument("pq_number: n >= 0 required");
    if (p == q) throw std::domain_error("pq_number: p != q required");
    if (n == 0) return -std::numeric_limits<double>::infinity();
    const double hi = std::max(p, q), lo = std::min(p, q);
    if (lo == 0.0) return (n - 1) * std::log(hi);
    // (hi^n - lo^n)/(hi - lo) = hi^n (1 - (lo/hi)^n)/(hi - lo)
    return n * std::log(hi) + std::log1p(-std::pow(lo / hi, n)) - std::log(hi - lo);
}

inline double log_pq_factorial(int n, double p, double q) {
    double s = 0.0;
    for (int j = 2; j <= n; ++j) s += log_pq_number(j, p, q);
    return s;
}

inline double pq_factorial(int n, double p, double q, FactorialMode mode = FactorialMode::linear) {
    const double lg = log_pq_factorial(n, p, q);
    if (mode == FactorialMode::log) return lg;
    if (lg > 708.0) throw std::overflow_error("pq_factorial: linear value overflows, use log mode");
    double r = 1.0;
    for (int j = 2; j <= n; ++j) r *= pq_number(j, p, q);
    return r;
}

enum class MomentKind { m1, m2, m_pq, factorial, custom };

/// Lazy positive sequence (m(n))_{n>=0} with m(0) = 1, accessed in the log
/// domain. The prefix-sum cache is guarded so concurrent readers are safe.
class MomentSequence {
   public:
    static MomentSequence m1(double q) {
        require_q(q);
        MomentSequence s(MomentKind::m1, QParams::single(q), "m1(q=" + fmt(q) + ")");
        return s;
    }

    static MomentSequence m2(double q) {
        require_q(q);
        MomentSequence s(MomentKind::m2, QParams::single(q), "m2(q=" + fmt(q) + ")");
        return s;
    }

    static MomentSequence m_pq(double p, double q) {
        MomentSequence s(MomentKind::m_pq, QParams::pair(p, q),
                         "m_pq(p=" + fmt(p) + ",q=" + fmt(q) + ")");
        return s;
    }

    static MomentSequence factorial() {
        MomentSequence s(MomentKind::factorial, QParams{}, "factorial");
        return s;
    }

    /// Custom sequence from a log-domain generator; m(0) = 1 is required.
    static MomentSequence custom(std::function<double(int)> log_gen, std::string label = "custom") {
        MomentSequence s(MomentKind::custom, QParams{}, std::move(label));
        s.impl_->log_gen = std::move(log_gen);
        if (std::abs(s.log_at(0)) > 1e-12)
            throw std::invalid_argument("MomentSequence: custom sequence must have m(0) = 1");
        return s;
    }

    MomentKind kind() const { return impl_->kind; }
    const QParams& params() const { return impl_->params; }
    const std::string& label() const { return impl_->label; }

    /// Known log-convex by construction (custom sequences are not assumed so).
    bool known_log_convex() const { return impl_->kind != MomentKind::custom; }

    double log_at(int n) const {
        if (n < 0) throw std::invalid_argument("MomentSequence: n >= 0 required");
        auto& im = *impl_;
        switch (im.kind) {
            case MomentKind::m1:
                return 0.5 * static_cast<double>(n) * (n - 1) * std::log(im.params.q);
            case MomentKind::factorial:
                return std::lgamma(static_cast<double>(n) + 1.0);
            case MomentKind::custom:
                return im.log_gen(n);
            case MomentKind::m2:
            case MomentKind::m_pq: {
                std::lock_guard<std::mutex> lock(im.mutex);
                while (static_cast<int>(im.prefix.size()) <= n) {
                    const int j = static_cast<int>(im.prefix.size());
                    im.prefix.push_back(im.prefix.back() + im.log_ratio_unlocked(j - 1));
                }
                return im.prefix[static_cast<std::size_t>(n)];
            }
        }
        throw std::logic_error("MomentSequence: unknown kind");
    }

    double at(int n) const { return std::exp(log_at(n)); }

    /// log(m(n+1)/m(n)), exact per kind where possible.
    double log_ratio(int n) const {
        auto& im = *impl_;
        if (im.kind == MomentKind::custom) return im.log_gen(n + 1) - im.log_gen(n);
        return im.log_ratio_unlocked(n);
    }

    /// m(n+1)/m(n) in linear space.
    double ratio(int n) const {
        auto& im = *impl_;
        switch (im.kind) {
            case MomentKind::m1:
                return std::pow(im.params.q, n);
            case MomentKind::m2:
                return q_number(n + 1, im.params.q);
            case MomentKind::m_pq:
                return pq_number(n + 1, *im.params.p, im.params.q);
            case MomentKind::factorial:
                return n + 1.0;
            case MomentKind::custom:
                return std::exp(log_ratio(n));
        }
        throw std::logic_error("MomentSequence: unknown kind");
    }

   private:
    struct Impl {
        MomentKind kind;
        QParams params;
        std::string label;
        std::function<double(int)> log_gen;
        mutable std::mutex mutex;
        mutable std::vector<double> prefix{0.0};  // prefix[n] = log m(n) for m2/m_pq

        double log_ratio_unlocked(int n) const {
            switch (kind) {
                case MomentKind::m1:
                    return n * std::log(params.q);
                case MomentKind::m2:
                    return log_q_number(n + 1, params.q);
                case MomentKind::m_pq:
                    return log_pq_number(n + 1, *params.p, params.q);
                case MomentKind::factorial:
                    return std::log(n + 1.0);
                default:
                    throw std::logic_error("MomentSequence: ratio for custom handled elsewhere");
            }
        }
    };

    MomentSequence(MomentKind kind, QParams params, std::string label)
        : impl_(std::make_shared<Impl>()) {
        impl_->kind = kind;
        impl_->params = params;
        impl_->label = std::move(label);
    }

    static void require_q(double q) {
        if (!(q > 1.0)) throw std::invalid_argument("MomentSequence: q > 1 required");
    }

    static std::string fmt(double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    }

    std::shared_ptr<Impl> impl_;
};

/// m(n)^2 <= m(n-1) m(n+1) for 1 <= n < n_max, compared in the log domain
/// with relative slack 1e-13 (exact ties do occur).
inline bool check_log_convex(const MomentSequence& m, int n_max) {
    if (n_max < 2) throw std::invalid_argument("check_log_convex: n_max >= 2 required");
    for (int n = 1; n < n_max; ++n) {
        const double lhs = 2.0 * m.log_at(n);
        const double rhs = m.log_at(n - 1) + m.log_at(n + 1);
        const double slack = 1e-13 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (lhs > rhs + slack) return false;
    }
    return true;
}

namespace detail {

inline double omega_term(const MomentSequence& m, double log_t, int n) {
    return n * log_t - m.log_at(n);
}

}  // namespace detail

/// omega_M(t) = sup_{0<=n<=n_cap} log(t^n / m(n)), with omega_M(0) = 0.
///
/// For log-convex sequences the terms are concave in n, so the search walks
/// up from n = 0 and stops at the first decrease; custom sequences fall back
/// to a full scan. A maximizer sitting at n_cap is rejected: the sup is only
/// trusted when the integer maximizer is interior.
inline double omega_weight(const MomentSequence& m, double t, int n_cap = 2000) {
    if (!(t >= 0.0)) throw std::domain_error("omega_weight: t >= 0 required");
    if (t == 0.0) return 0.0;
    const double log_t = std::log(t);
    if (m.known_log_convex()) {
        double best = 0.0;  // n = 0 term: -log m(0) = 0
        double prev = best;
        for (int n = 1; n <= n_cap; ++n) {
            const double cur = detail::omega_term(m, log_t, n);
            if (cur > best) best = cur;
            if (cur < prev) return std::max(best, 0.0);
            prev = cur;
        }
        throw std::runtime_error("omega_weight: maximizer reached n_cap, increase n_cap");
    }
    double best = 0.0;
    int arg_best = 0;
    for (int n = 1; n <= n_cap; ++n) {
        const double cur = detail::omega_term(m, log_t, n);
        if (cur > best) {
            best = cur;
            arg_best = n;
        }
    }
    if (arg_best >= n_cap)
        throw std::runtime_error("omega_weight: maximizer reached n_cap, increase n_cap");
    return std::max(best, 0.0);
}

/// Moment sequence plus a memoized omega_M evaluation front end.
class WeightFunction {
   public:
    explicit WeightFunction(MomentSequence base, int n_cap = 2000)
        : base_(std::move(base)), n_cap_(n_cap), cache_(std::make_shared<Cache>()) {}

    const MomentSequence& base() const { return base_; }

    double operator()(double t) const {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->values.find(t);
        if (it != cache_->values.end()) return it->second;
        const double v = omega_weight(base_, t, n_cap_);
        cache_->values.emplace(t, v);
        return v;
    }

   private:
    struct Cache {
        std::mutex mutex;
        std::map<double, double> values;
    };
    MomentSequence base_;
    int n_cap_;
    std::shared_ptr<Cache> cache_;
};

/// Pointwise product sequence; log-convexity is preserved, so the fast
/// omega search stays valid when both factors are non-custom.
inline MomentSequence product_sequence(const MomentSequence& a, const MomentSequence& b) {
    return MomentSequence::custom([a, b](int n) { return a.log_at(n) + b.log_at(n); },
                                  a.label() + "*" + b.label());
}

/// Verifies e^{omega_{M1*M2}(r)} <= e^{omega_{M1}(s)} e^{omega_{M2}(r/s)}
/// at every grid point, in the log domain. Failures are reported, not thrown.
inline CheckReport check_weight_submultiplicativity(const MomentSequence& m1,
                                                    const MomentSequence& m2,
                                                    const std::vector<double>& r_grid,
                                                    const std::vector<double>& s_grid,
                                                    int n_cap = 2000) {
    const MomentSequence prod = product_sequence(m1, m2);
    double worst = -std::numeric_limits<double>::infinity();
    std::string worst_at = "-";
    for (double r : r_grid) {
        for (double s : s_grid) {
            const double lhs = omega_weight(prod, r, n_cap);
            const double rhs = omega_weight(m1, s, n_cap) + omega_weight(m2, r / s, n_cap);
            const double violation = lhs - rhs;
            if (violation > worst) {
                worst = violation;
                std::ostringstream os;
                os << "r=" << r << ",s=" << s;
                worst_at = os.str();
            }
        }
    }
    CheckReport rep = make_check("qcore.weight_submultiplicativity", 0.0, std::max(worst, 0.0), 1e-12);
    rep.params["m1"] = m1.label();
    rep.params["m2"] = m2.label();
    rep.params["worst_at"] = worst_at;
    return rep;
}

/// Builds the spec'd moment sequences from a parameter bundle.
inline MomentSequence moment_sequence(MomentKind kind, const QParams& params) {
    switch (kind) {
        case MomentKind::m1:
            return MomentSequence::m1(params.q);
        case MomentKind::m2:
            return MomentSequence::m2(params.q);
        case MomentKind::m_pq:
            if (!params.p) throw std::invalid_argument("moment_sequence: m_pq needs p");
            return MomentSequence::m_pq(*params.p, params.q);
        case MomentKind::factorial:
            return MomentSequence::factorial();
        case MomentKind::custom:
            throw std::invalid_argument("moment_sequence: custom sequences need a generator");
    }
    throw std::logic_error("moment_sequence: unknown kind");
}

}  // namespace qcalc
