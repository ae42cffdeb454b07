#pragma once

// Theta_q, exp_q and E_q on the complex plane / Riemann surface of the
// logarithm. Theta is argument-reduced to the annulus |z| in [1, q)
// before the bilateral sum; the entire series are summed outward from the
// peak term in scaled space, so values whose logarithm fits in binary64
// are reachable even when the value itself does not. All sums use
// compensated accumulation in a fixed index order.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "qcalc/qcore.hpp"

namespace qcalc {

using Complex = std::complex<double>;

/// Point of the Riemann surface R as (log-modulus, unreduced argument).
struct LogPolarPoint {
    double log_r = 0.0;
    double arg = 0.0;

    static LogPolarPoint from_complex(Complex z) {
        if (z == Complex(0.0, 0.0))
            throw std::domain_error("LogPolarPoint: the origin is not on the surface");
        return {std::log(std::abs(z)), std::arg(z)};
    }

    Complex to_complex() const { return std::polar(std::exp(log_r), arg); }

    LogPolarPoint scaled(double log_factor, double arg_shift = 0.0) const {
        return {log_r + log_factor, arg + arg_shift};
    }

    bool operator==(const LogPolarPoint& o) const { return log_r == o.log_r && arg == o.arg; }
};

struct SeriesEvalResult {
    Complex value{0.0, 0.0};
    int terms_used = 1;
    double tail_bound = 0.0;  // absolute bound on the truncated tail
};

/// Series value in log-polar form: value = exp(log_mod) * e^{i arg}.
struct LogSeriesResult {
    double log_mod = 0.0;
    double arg = 0.0;
    int terms_used = 1;
    double tail_rel = 0.0;  // tail bound relative to |value|

    Complex to_complex() const { return std::polar(std::exp(log_mod), arg); }
};

namespace detail {

// Neumaier compensated accumulator.
struct Compensated {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

struct CompensatedC {
    Compensated re, im;
    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }
    Complex value() const { return {re.value(), im.value()}; }
};

inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

// Peak index of t_n = n*logr - log m(n) over n >= 0 (terms are concave in n
// for log-convex m). Returns {n*, t_{n*}}.
inline std::pair<int, double> series_peak(const MomentSequence& m, double log_r) {
    int n = 0;
    double t = 0.0;
    for (;;) {
        const double t_next = t + log_r - m.log_ratio(n);
        if (t_next < t || n > 2000000) return {n, t};
        t = t_next;
        ++n;
    }
}

// sum_n z^n / m(n) in scaled space: starts at the peak term and walks both
// directions; ratios are monotone, so the geometric tail is certified.
inline LogSeriesResult entire_series_log(const MomentSequence& m, LogPolarPoint w, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("entire series: tol > 0 required");
    // cancellation can leave |sum| far below the peak term, so the stop
    // threshold is driven to the rounding floor regardless of tol; tol only
    // ever loosens the certified tail bound, never the computed value
    const double stop = 0.25 * std::min(tol, 4e-17);
    const auto [n_star, log_peak] = series_peak(m, w.log_r);
    const Complex z = w.to_complex();

    const Complex u0 = std::polar(1.0, std::fmod(n_star * w.arg, 2.0 * M_PI));
    CompensatedC acc;
    acc.add(u0);
    int terms = 1;
    double tail = 0.0;

    // upward from the peak: next/current = z / (m(n+1)/m(n))
    {
        Complex v = u0;
        int n = n_star;
        for (;;) {
            const Complex step = z / m.ratio(n);
            v *= step;
            acc.add(v);
            ++terms;
            ++n;
            const double ratio = std::abs(z) / m.ratio(n);
            if (std::abs(v) < stop * std::abs(acc.value()) && ratio < 0.5) {
                tail += std::abs(v) * ratio / (1.0 - ratio);
                break;
            }
            if (terms > 1000000) throw std::runtime_error("entire series: term budget exceeded");
        }
    }
    // downward from the peak: prev/current = (m(n)/m(n-1)) / z
    {
        Complex v = u0;
        int n = n_star;
        while (n > 0) {
            const Complex step = m.ratio(n - 1) / z;
            v *= step;
            acc.add(v);
            ++terms;
            --n;
            if (n == 0) break;
            const double ratio = m.ratio(n - 1) / std::abs(z);
            if (std::abs(v) < stop * std::abs(acc.value()) && ratio < 0.5) {
                tail += std::abs(v) * ratio / (1.0 - ratio);
                break;
            }
        }
    }

    const Complex s = acc.value();
    LogSeriesResult out;
    out.terms_used = terms;
    if (s == Complex(0.0, 0.0)) {
        out.log_mod = -std::numeric_limits<double>::infinity();
        out.arg = 0.0;
        out.tail_rel = std::numeric_limits<double>::infinity();
        return out;
    }
    out.log_mod = log_peak + std::log(std::abs(s));
    out.arg = std::arg(s);
    out.tail_rel = tail / std::abs(s);
    return out;
}

inline SeriesEvalResult materialize(const LogSeriesResult& r) {
    SeriesEvalResult out;
    out.value = r.to_complex();
    out.terms_used = r.terms_used;
    out.tail_bound = r.tail_rel * std::exp(r.log_mod);
    return out;
}

}  // namespace detail

/// exp_q on the surface, result in log-polar form.
inline LogSeriesResult exp_q_log(LogPolarPoint w, double q, double tol) {
    if (!(q > 1.0)) throw std::domain_error("exp_q: q > 1 required");
    return detail::entire_series_log(MomentSequence::m2(q), w, tol);
}

/// E_q on the surface, result in log-polar form.
inline LogSeriesResult e_q_log(LogPolarPoint w, double q, double tol) {
    if (!(q > 1.0)) throw std::domain_error("E_q: q > 1 required");
    return detail::entire_series_log(MomentSequence::m1(q), w, tol);
}

/// exp_q(z) = sum z^n/[n]_q!; entire for q > 1.
inline SeriesEvalResult exp_q_entire(Complex z, double q, double tol) {
    if (!(q > 1.0)) throw std::domain_error("exp_q: q > 1 required");
    if (z == Complex(0.0, 0.0)) return {Complex(1.0, 0.0), 1, 0.0};
    return detail::materialize(exp_q_log(LogPolarPoint::from_complex(z), q, tol));
}

/// E_q(z) = sum z^n / q^{n(n-1)/2}; entire for q > 1.
inline SeriesEvalResult e_q_entire(Complex z, double q, double tol) {
    if (!(q > 1.0)) throw std::domain_error("E_q: q > 1 required");
    if (z == Complex(0.0, 0.0)) return {Complex(1.0, 0.0), 1, 0.0};
    return detail::materialize(e_q_log(LogPolarPoint::from_complex(z), q, tol));
}

/// Jacobi Theta, log-polar in and out.
///
/// The point is reduced to |z| in [1, q) with the functional equation
/// Theta_q(q^m z) = q^{m(m+1)/2} z^m Theta_q(z); the prefactor only ever
/// exists in log-polar form, so |z| of the order exp(+-700) is fine. The
/// reduced bilateral sum runs n = 0,1,2,... then n = -1,-2,... with
/// compensated accumulation.
inline LogSeriesResult theta_q_log(LogPolarPoint z, double q, double tol) {
    if (!(q > 1.0)) throw std::domain_error("theta_q: q > 1 required");
    if (!(tol > 0.0)) throw std::invalid_argument("theta_q: tol > 0 required");
    const double stop = 0.25 * std::min(tol, 4e-17);
    const double L = std::log(q);
    const double m = std::floor(z.log_r / L);
    const double lr = z.log_r - m * L;  // in [0, L)
    const Complex zr = std::polar(std::exp(lr), detail::wrap_angle(z.arg));
    const double azr = std::abs(zr);

    detail::CompensatedC acc;
    int terms = 0;
    double tail = 0.0;
    // n >= 0: term ratio t_{n+1}/t_n = zr * q^{-n}
    {
        Complex v(1.0, 0.0);
        int n = 0;
        for (;;) {
            acc.add(v);
            ++terms;
            const double ratio = azr * std::pow(q, -n);
            v *= zr * std::pow(q, -n);
            ++n;
            if (n >= 2 && ratio < 0.5 && std::abs(v) < stop * std::abs(acc.value())) {
                tail += std::abs(v) / (1.0 - ratio * std::pow(q, -1));
                break;
            }
            if (n > 500) throw std::runtime_error("theta_q: term budget exceeded");
        }
    }
    // n <= -1: term ratio t_{n-1}/t_n = q^{n-1} / zr
    {
        Complex v = std::pow(q, -1.0) / zr;  // n = -1 term: q^{-(-1)(-2)/2} zr^{-1}
        int n = -1;
        for (;;) {
            acc.add(v);
            ++terms;
            const double ratio = std::pow(q, n - 1) / azr;
            v *= std::pow(q, n - 1) / zr;
            --n;
            if (ratio < 0.5 && std::abs(v) < stop * std::abs(acc.value())) {
                tail += std::abs(v) / (1.0 - ratio / q);
                break;
            }
            if (n < -500) throw std::runtime_error("theta_q: term budget exceeded");
        }
    }

    const Complex s = acc.value();
    LogSeriesResult out;
    out.terms_used = terms;
    if (s == Complex(0.0, 0.0)) {
        out.log_mod = -std::numeric_limits<double>::infinity();
        out.tail_rel = std::numeric_limits<double>::infinity();
        return out;
    }
    // prefactor q^{m(m+1)/2} zr^m in log-polar form
    out.log_mod = 0.5 * m * (m + 1.0) * L + m * lr + std::log(std::abs(s));
    out.arg = m * z.arg + std::arg(s);
    out.tail_rel = tail / std::abs(s);
    return out;
}

inline SeriesEvalResult theta_q(LogPolarPoint z, double q, double tol) {
    return detail::materialize(theta_q_log(z, q, tol));
}

inline SeriesEvalResult theta_q(Complex z, double q, double tol) {
    return theta_q(LogPolarPoint::from_complex(z), q, tol);
}

enum class ZeroFamily { theta, exp_q };

/// Relative distance of w to the nearest zero of the family, in the paper's
/// exclusion-disk normalization: min_m |1 + w q^m| for Theta_q, and
/// min_{m>=0} |w + q^{m+1}/(q-1)| (q-1)/q^{m+1} for exp_q. Only the O(1)
/// candidates with q^m near 1/|w| contribute; everything else tends to 1
/// or infinity.
inline double nearest_zero_distance(ZeroFamily kind, Complex w, double q) {
    if (!(q > 1.0)) throw std::domain_error("nearest_zero_distance: q > 1 required");
    const double L = std::log(q);
    if (kind == ZeroFamily::theta) {
        if (w == Complex(0.0, 0.0))
            throw std::domain_error("nearest_zero_distance: w != 0 required for theta");
        const double m_center = -std::log(std::abs(w)) / L;
        double best = 1.0;  // m -> -infinity limit of |1 + w q^m|
        const long m0 = std::lround(m_center);
        for (long m = m0 - 3; m <= m0 + 3; ++m) {
            const double d = std::abs(1.0 + w * std::exp(static_cast<double>(m) * L));
            best = std::min(best, d);
        }
        return best;
    }
    // exp_q zeros at -q^{m+1}/(q-1), m >= 0
    const double aw = std::abs(w);
    if (aw == 0.0) return 1.0;
    double best = 1.0;  // m -> infinity limit of |w + R_m|/R_m
    const long m0 = std::lround(std::log(aw * (q - 1.0)) / L - 1.0);
    for (long m = std::max<long>(0, m0 - 3); m <= std::max<long>(0, m0 + 3); ++m) {
        const double radius = std::exp((m + 1.0) * L) / (q - 1.0);
        best = std::min(best, std::abs(w + radius) / radius);
    }
    return best;
}

/// exp_{1/q}(-q t), computed as 1/exp_q(q t) via the reciprocal identity;
/// refuses to evaluate within `exclusion` relative distance of a zero of
/// exp_q(q .).
inline Complex exp_q_reciprocal(Complex t, double q, double tol, double exclusion = 1e-3) {
    if (!(q > 1.0)) throw std::domain_error("exp_q_reciprocal: q > 1 required");
    const Complex qt = q * t;
    if (qt == Complex(0.0, 0.0)) return Complex(1.0, 0.0);
    if (nearest_zero_distance(ZeroFamily::exp_q, qt, q) < exclusion)
        throw std::domain_error("exp_q_reciprocal: non-evaluable near pole of 1/exp_q(q t)");
    const LogSeriesResult lg = exp_q_log(LogPolarPoint::from_complex(qt), q, tol);
    return std::polar(std::exp(-lg.log_mod), -lg.arg);
}

}  // namespace qcalc
