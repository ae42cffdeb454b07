#pragma once

// Truncated power series, moment derivatives, the pointwise q-, tilde- and
// (p,q)-derivatives, and the reference function corpus the integral
// representation tests check against. The iterated pointwise derivatives
// share their evaluation nodes through small triangular tables, so the
// k-fold operators cost O(k^2) function values instead of 2^k.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcalc/special.hpp"

namespace qcalc {

/// |a_n| <= C rho^n for n > N; evaluation is only claimed accurate for
/// |z| < 1/rho when a tail is present.
struct GeometricTail {
    double C = 0.0;
    double rho = 0.0;
};

/// Complex Maclaurin coefficients up to order N plus a tail descriptor.
class TruncatedPowerSeries {
   public:
    TruncatedPowerSeries() : coeffs_(1, Complex(0.0, 0.0)) {}
    explicit TruncatedPowerSeries(std::vector<Complex> coeffs,
                                  std::optional<GeometricTail> tail = std::nullopt)
        : coeffs_(std::move(coeffs)), tail_(tail) {
        if (coeffs_.empty()) throw std::invalid_argument("TruncatedPowerSeries: order >= 0 required");
        if (tail_ && !(tail_->rho >= 0.0))
            throw std::invalid_argument("TruncatedPowerSeries: tail rho >= 0 required");
    }

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    Complex coeff(int n) const {
        return n <= order() ? coeffs_[static_cast<std::size_t>(n)] : Complex(0.0, 0.0);
    }
    const std::optional<GeometricTail>& tail() const { return tail_; }

    Complex eval(Complex z) const {
        Complex acc(0.0, 0.0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    /// Bound on the dropped tail at z; infinite when rho |z| >= 1.
    double tail_bound(Complex z) const {
        if (!tail_ || tail_->C == 0.0) return 0.0;
        const double x = tail_->rho * std::abs(z);
        if (x >= 1.0) return std::numeric_limits<double>::infinity();
        return tail_->C * std::pow(x, order() + 1) / (1.0 - x);
    }

   private:
    std::vector<Complex> coeffs_;
    std::optional<GeometricTail> tail_;
};

/// Closed-form evaluator plus series generator for one reference function.
struct FunctionSpec {
    std::string name;
    std::function<Complex(Complex)> closed_form;
    std::function<TruncatedPowerSeries(int)> series;  // series(order)
    double radius = 0.0;                              // analyticity radius at 0 (inf allowed)

    /// Spec invariant: both routes agree to `tol` at `samples` points with
    /// |z| <= min(radius, cap)/2.
    bool validate(double tol = 1e-10, int samples = 20, double cap = 4.0) const {
        const double r = 0.5 * std::min(radius, cap);
        const TruncatedPowerSeries tps = series(72);
        for (int i = 0; i < samples; ++i) {
            const double rho = r * (0.15 + 0.8 * (i + 0.5) / samples);
            const double phi = 2.0 * M_PI * std::fmod(0.618033988749895 * i, 1.0);
            const Complex z = std::polar(rho, phi);
            const Complex a = closed_form(z);
            const Complex b = tps.eval(z);
            if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
        }
        return true;
    }
};

/// Coefficient rule b_n = (m(n+k)/m(n)) a_{n+k}; output order N-k.
inline TruncatedPowerSeries moment_derivative(const TruncatedPowerSeries& f,
                                              const MomentSequence& m, int k) {
    if (k < 0) throw std::invalid_argument("moment_derivative: k >= 0 required");
    if (k > f.order()) throw std::invalid_argument("moment_derivative: k exceeds series order");
    std::vector<Complex> out(static_cast<std::size_t>(f.order() - k) + 1);
    for (int n = 0; n <= f.order() - k; ++n) {
        const double log_ratio = m.log_at(n + k) - m.log_at(n);
        out[static_cast<std::size_t>(n)] = f.coeff(n + k) * std::exp(log_ratio);
    }
    std::optional<GeometricTail> tail = f.tail();
    if (tail && tail->C > 0.0) {
        // the ratio m(n+k)/m(n) grows with n; the tail stays geometric only
        // in the trivial C = 0 case, so drop the certificate
        tail.reset();
    }
    return TruncatedPowerSeries(std::move(out), tail);
}

namespace detail {

inline void require_node_in_domain(const FunctionSpec& f, Complex node) {
    if (!(std::abs(node) < f.radius))
        throw std::domain_error("derivative: evaluation node " + std::to_string(std::abs(node)) +
                                " outside analyticity domain of " + f.name);
}

}  // namespace detail

/// k-fold Jackson derivative (f(qz) - f(z))/((q-1)z) by a triangular
/// divided-difference table over the memoized nodes q^j z.
inline Complex jackson_dq(const FunctionSpec& f, Complex z, double q, int k) {
    if (!(q > 1.0)) throw std::domain_error("jackson_dq: q > 1 required");
    if (k < 0) throw std::invalid_argument("jackson_dq: k >= 0 required");
    if (k == 0) return f.closed_form(z);
    if (z == Complex(0.0, 0.0)) {
        // removable singularity: use the series route
        const TruncatedPowerSeries d = moment_derivative(f.series(k + 4), MomentSequence::m2(q), k);
        return d.coeff(0);
    }
    std::vector<Complex> g(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
        const Complex node = std::pow(q, j) * z;
        detail::require_node_in_domain(f, node);
        g[static_cast<std::size_t>(j)] = f.closed_form(node);
    }
    for (int level = 1; level <= k; ++level) {
        for (int j = 0; j <= k - level; ++j) {
            const Complex w = std::pow(q, j) * z;
            g[static_cast<std::size_t>(j)] =
                (g[static_cast<std::size_t>(j + 1)] - g[static_cast<std::size_t>(j)]) / ((q - 1.0) * w);
        }
    }
    return g[0];
}

/// k-fold tilde derivative (g(qz) - g(0))/(qz). Each iteration needs the
/// current function's value at the origin, which comes from the series:
/// after i steps the constant term is q^{i(i-1)/2} a_i.
inline Complex tilde_dq(const FunctionSpec& f, Complex z, double q, int k) {
    if (!(q > 1.0)) throw std::domain_error("tilde_dq: q > 1 required");
    if (k < 0) throw std::invalid_argument("tilde_dq: k >= 0 required");
    if (k == 0) return f.closed_form(z);
    const TruncatedPowerSeries tps = f.series(k + 4);
    if (z == Complex(0.0, 0.0)) {
        const TruncatedPowerSeries d = moment_derivative(tps, MomentSequence::m1(q), k);
        return d.coeff(0);
    }
    std::vector<Complex> g(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
        const Complex node = std::pow(q, j) * z;
        detail::require_node_in_domain(f, node);
        g[static_cast<std::size_t>(j)] = f.closed_form(node);
    }
    for (int level = 1; level <= k; ++level) {
        const Complex at_zero =
            std::pow(q, 0.5 * (level - 1.0) * (level - 2.0)) * tps.coeff(level - 1);
        for (int j = 0; j <= k - level; ++j) {
            const Complex w = std::pow(q, j) * z;
            g[static_cast<std::size_t>(j)] = (g[static_cast<std::size_t>(j + 1)] - at_zero) / (q * w);
        }
    }
    return g[0];
}

/// k-fold (p,q)-derivative (f(pz) - f(qz))/((p-q)z) over the memoized node
/// grid p^i q^j z. p = 0 reduces to the tilde derivative and is dispatched
/// there (the raw quotient is 0/0 at the collapsed nodes).
inline Complex pq_derivative(const FunctionSpec& f, Complex z, double p, double q, int k) {
    if (p == q) throw std::domain_error("pq_derivative: p != q required");
    if (!(p >= 0.0) || !(q >= 0.0))
        throw std::domain_error("pq_derivative: p, q >= 0 required");
    if (k < 0) throw std::invalid_argument("pq_derivative: k >= 0 required");
    if (k == 0) return f.closed_form(z);
    if (p == 0.0) return tilde_dq(f, z, std::max(p, q), k);
    if (q == 0.0) return tilde_dq(f, z, std::max(p, q), k);
    if (z == Complex(0.0, 0.0)) {
        const TruncatedPowerSeries d =
            moment_derivative(f.series(k + 4), MomentSequence::m_pq(p, q), k);
        return d.coeff(0);
    }
    // grid[i][j] starts as f(p^i q^j z) on i + j <= k
    std::vector<std::vector<Complex>> grid(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        grid[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(k - i) + 1);
        for (int j = 0; j <= k - i; ++j) {
            const Complex node = std::pow(p, i) * std::pow(q, j) * z;
            detail::require_node_in_domain(f, node);
            grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = f.closed_form(node);
        }
    }
    for (int level = 1; level <= k; ++level) {
        for (int i = 0; i + level <= k; ++i) {
            for (int j = 0; i + j + level <= k; ++j) {
                const Complex w = std::pow(p, i) * std::pow(q, j) * z;
                grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (grid[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)] -
                     grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)]) /
                    ((p - q) * w);
            }
        }
    }
    return grid[0][0];
}

namespace detail {

inline FunctionSpec monomial_spec(int n) {
    FunctionSpec f;
    f.name = "z^" + std::to_string(n);
    f.closed_form = [n](Complex z) { return n == 0 ? Complex(1.0, 0.0) : std::pow(z, n); };
    f.series = [n](int order) {
        std::vector<Complex> c(static_cast<std::size_t>(std::max(order, n)) + 1, Complex(0.0, 0.0));
        c[static_cast<std::size_t>(n)] = Complex(1.0, 0.0);
        return TruncatedPowerSeries(std::move(c), GeometricTail{0.0, 0.0});
    };
    f.radius = std::numeric_limits<double>::infinity();
    return f;
}

inline FunctionSpec polynomial_spec(std::string name, std::vector<Complex> coeffs) {
    FunctionSpec f;
    f.name = std::move(name);
    f.series = [coeffs](int order) {
        std::vector<Complex> c = coeffs;
        c.resize(static_cast<std::size_t>(std::max<int>(order, static_cast<int>(coeffs.size()) - 1)) + 1,
                 Complex(0.0, 0.0));
        return TruncatedPowerSeries(std::move(c), GeometricTail{0.0, 0.0});
    };
    f.closed_form = [coeffs](Complex z) {
        Complex acc(0.0, 0.0);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
        return acc;
    };
    f.radius = std::numeric_limits<double>::infinity();
    return f;
}

inline FunctionSpec geometric_spec(double scale) {
    // 1/(1 - z/scale), coefficients scale^-n, radius scale
    FunctionSpec f;
    f.name = scale == 1.0 ? "1/(1-z)" : "1/(1-z/2)";
    f.closed_form = [scale](Complex z) { return 1.0 / (1.0 - z / scale); };
    f.series = [scale](int order) {
        std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
        double a = 1.0;
        for (int n = 0; n <= order; ++n, a /= scale) c[static_cast<std::size_t>(n)] = a;
        return TruncatedPowerSeries(std::move(c), GeometricTail{1.0, 1.0 / scale});
    };
    f.radius = scale;
    return f;
}

// smallest C with |a_n| <= C rho^n over the materialized range
inline double fit_tail_constant(const std::vector<Complex>& coeffs, double rho) {
    double C = 0.0;
    double p = 1.0;
    for (const Complex& a : coeffs) {
        C = std::max(C, std::abs(a) / p);
        p *= rho;
    }
    return C;
}

inline FunctionSpec entire_exp_spec() {
    FunctionSpec f;
    f.name = "e^z";
    f.closed_form = [](Complex z) { return std::exp(z); };
    f.series = [](int order) {
        std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
        double a = 1.0;
        for (int n = 0; n <= order; ++n) {
            c[static_cast<std::size_t>(n)] = a;
            a /= (n + 1.0);
        }
        return TruncatedPowerSeries(c, GeometricTail{fit_tail_constant(c, 0.5), 0.5});
    };
    f.radius = std::numeric_limits<double>::infinity();
    return f;
}

inline FunctionSpec self_series_spec(std::string name, MomentSequence m, double tol) {
    FunctionSpec f;
    f.name = std::move(name);
    f.closed_form = [m, tol](Complex z) {
        if (z == Complex(0.0, 0.0)) return Complex(1.0, 0.0);
        return materialize(entire_series_log(m, LogPolarPoint::from_complex(z), tol)).value;
    };
    f.series = [m](int order) {
        std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
        for (int n = 0; n <= order; ++n) c[static_cast<std::size_t>(n)] = std::exp(-m.log_at(n));
        return TruncatedPowerSeries(c, GeometricTail{fit_tail_constant(c, 0.5), 0.5});
    };
    f.radius = std::numeric_limits<double>::infinity();
    return f;
}

}  // namespace detail

/// The reference corpus: monomials z^n (n <= 6), two mixed-coefficient
/// polynomials, the geometric functions 1/(1-z) and 1/(1-z/2), e^z, and
/// E_q / exp_q themselves as self-referential members.
inline std::vector<FunctionSpec> corpus(double q = 2.0, double tol_series = 1e-13) {
    std::vector<FunctionSpec> out;
    for (int n = 0; n <= 6; ++n) out.push_back(detail::monomial_spec(n));
    out.push_back(detail::polynomial_spec("poly3", {Complex(1.0, 0.5), Complex(-2.0, 0.0),
                                                    Complex(0.0, 1.0), Complex(0.25, -0.75)}));
    out.push_back(detail::polynomial_spec("poly5", {Complex(0.0, 0.0), Complex(1.0, -1.0),
                                                    Complex(0.5, 0.5), Complex(0.0, 0.0),
                                                    Complex(-1.0, 0.25), Complex(2.0, 0.0)}));
    out.push_back(detail::geometric_spec(1.0));
    out.push_back(detail::geometric_spec(2.0));
    out.push_back(detail::entire_exp_spec());
    out.push_back(detail::self_series_spec("E_q", MomentSequence::m1(q), tol_series));
    out.push_back(detail::self_series_spec("exp_q", MomentSequence::m2(q), tol_series));
    return out;
}

}  // namespace qcalc
