#pragma once

// The integral identities: moment integrals for the sequences q^{n(n-1)/2}
// and [n]_q!, the Cauchy-kernel representations of z/(omega - z), and the
// nested contour representations of the tilde-, Jackson- and (p,q)-
// derivatives. Envelopes are assembled from the fitted growth constants;
// the cross terms of log^2 cancel, so the Cauchy/derivative integrands
// decay like a pure power of |zeta| whose exponent reproduces the
// convergence constraints |omega/z| > q^{alpha - 1/2} resp. > q^k.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qcalc/bounds.hpp"
#include "qcalc/series.hpp"

namespace qcalc {

/// Parameters of the representation integrals.
struct ReprParams {
    double q = 2.0;
    double p = 0.0;       // only for the (p,q) corollary
    int k = 0;
    double eps = 0.5;     // contour radius
    double alpha = 0.75;  // E_q growth exponent (estimate + safety by default)
    double margin = 0.3;  // direction margin, radians
    double tol = 1e-8;
};

/// alpha used in admissibility constraints: the fitted Lemma-2 exponent
/// plus 0.25 safety.
inline double estimated_alpha(double q) { return (detail::eq_growth(q).alpha - 0.05) + 0.25; }

namespace detail {

// relative exclusion-disk radius reachable from a ray whose argument stays
// `psi` away from the negative axis; quantized downward for cache reuse
inline double ray_exclusion_delta(double psi_to_pi) {
    const double raw = psi_to_pi >= 0.5 * M_PI ? 1.0 : std::sin(psi_to_pi);
    static constexpr double grid[] = {0.9, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
    for (double g : grid)
        if (raw >= g) return g;
    throw std::domain_error("ray too close to the negative-axis zero set");
}

inline double dist_to_pi(double a) { return M_PI - std::abs(wrap_angle(a)); }

// envelope of  const * zeta^k * E_q(a zeta) / Theta_q(b zeta)  along a ray
// whose Theta argument has angle psi_b; log_a = -inf encodes a = 0.
inline DecayEnvelope theta_ratio_envelope(double q, double log_a, double log_b, double psi_b,
                                          int k, double log_const) {
    const double beta = beta_of(q);
    const double delta = ray_exclusion_delta(dist_to_pi(psi_b));
    const double log_dd = theta_lower_log_const(q, delta);
    const EqGrowth gr = eq_growth(q);

    EnvelopeBranch denom_part;  // Gaussian part shared by both branches
    denom_part.beta = beta;
    denom_part.mu = k - log_b / std::log(q) - 0.5;
    denom_part.log_c = log_const - log_dd - beta * log_b * log_b - 0.5 * log_b;

    if (log_a == -std::numeric_limits<double>::infinity()) {
        DecayEnvelope env;  // numerator is 1
        env.main = denom_part;
        return env;
    }

    DecayEnvelope env;
    env.r0 = std::exp(-log_a);  // |a zeta| = 1 split
    EnvelopeBranch small = denom_part;
    const double log_E1 = e_q_log({0.0, 0.0}, q, 1e-13).log_mod + std::log(1.05);
    small.log_c += log_E1;
    env.small = small;

    env.main.beta = 0.0;
    env.main.mu = k + gr.alpha - 0.5 + (log_a - log_b) / std::log(q);
    env.main.log_c = log_const + gr.log_K - log_dd + beta * (log_a * log_a - log_b * log_b) +
                     gr.alpha * log_a - 0.5 * log_b;
    return env;
}

// envelope of  const * zeta^k * exp_q(a zeta) / exp_q(b zeta)  (base q of
// both factors is `q` here; the corollary passes q/p).
inline DecayEnvelope expq_ratio_envelope(double q, double log_a, double log_b, double psi_b,
                                         int k, double log_const) {
    const double beta = beta_of(q);
    const double gamma = gamma_expq(q);
    const double eps_x = ray_exclusion_delta(dist_to_pi(psi_b));
    const ExpqConstants ec = expq_constants(q, eps_x);
    const double R0 = std::sqrt(q) / (q - 1.0);

    const bool zero_a = log_a == -std::numeric_limits<double>::infinity();
    const double log_r0 =
        zero_a ? std::log(R0) - log_b : std::max(-log_a, std::log(R0) - log_b);

    DecayEnvelope env;
    env.r0 = std::exp(log_r0);

    // main branch: both factors in their growth regime; with a = 0 the
    // numerator is 1 and the envelope stays Gaussian
    if (zero_a) {
        env.main.beta = beta;
        env.main.mu = k - log_b / std::log(q) - gamma;
        env.main.log_c =
            log_const + ec.log_K0 - std::log(eps_x) - beta * log_b * log_b - gamma * log_b;
    } else {
        env.main.beta = 0.0;
        env.main.mu = k + (log_a - log_b) / std::log(q);
        env.main.log_c = log_const + ec.log_C1 + ec.log_K0 - std::log(eps_x) +
                         beta * (log_a * log_a - log_b * log_b) + gamma * (log_a - log_b);
    }

    // small branch: flat bounds on both factors
    const double num_max =
        zero_a ? 0.0 : exp_q_log({log_a + log_r0, 0.0}, q, 1e-13).log_mod + std::log(1.05);
    double denom_inv_max = -ec.log_C0;
    if (log_b + log_r0 > std::log(R0) + 1e-12) {
        // part of the small region has the denominator in its growth regime:
        // bound 1/|exp_q| by the minimum of the lower envelope G(s) = beta s^2
        // + gamma s over [log R0, log(B r0)] (quadratic, exact minimum)
        const double lo = std::log(R0), hi = log_b + log_r0;
        const double vertex = -gamma / (2.0 * beta);
        double min_G = std::min(beta * lo * lo + gamma * lo, beta * hi * hi + gamma * hi);
        if (vertex > lo && vertex < hi) min_G = std::min(min_G, beta * vertex * vertex + gamma * vertex);
        denom_inv_max = std::max(denom_inv_max, ec.log_K0 - std::log(eps_x) - min_G);
    }
    EnvelopeBranch small;
    small.beta = 0.0;
    small.mu = k;
    small.log_c = log_const + num_max + denom_inv_max;
    env.small = small;
    return env;
}

inline Complex polar_value(double log_mod, double arg) {
    return std::polar(std::exp(log_mod), arg);
}

}  // namespace detail

/// (q/log q) int_{L_theta} t^n / Theta_q(q t) dt; converges to q^{n(n-1)/2}.
inline QuadResult moment_integral_m1(int n, double q, double theta, double tol) {
    if (n < 0) throw std::invalid_argument("moment_integral_m1: n >= 0 required");
    if (!(q > 1.0)) throw std::domain_error("moment_integral_m1: q > 1 required");
    const double beta = detail::beta_of(q);
    const double delta = detail::ray_exclusion_delta(detail::dist_to_pi(theta));
    const double log_dd = detail::theta_lower_log_const(q, delta);
    const double log_const = std::log(q / std::log(q));

    DecayEnvelope env;
    env.main.beta = beta;
    env.main.mu = n - 1.5;
    env.main.log_c = log_const - log_dd - beta * std::log(q) * std::log(q) - 0.5 * std::log(q);

    auto g = [n, q, log_const](Complex t) {
        const LogPolarPoint lp = LogPolarPoint::from_complex(t);
        const LogSeriesResult th = theta_q_log(lp.scaled(std::log(q)), q, 1e-13);
        return detail::polar_value(n * lp.log_r - th.log_mod + log_const, n * lp.arg - th.arg);
    };
    return integrate_ray_rel(g, RaySpec{theta, {}, {}}, env, tol);
}

/// ((q-1)/log q) int_{L_theta} t^n exp_{1/q}(-q t) dt; converges to [n]_q!.
inline QuadResult moment_integral_m2(int n, double q, double theta, double tol) {
    if (n < 0) throw std::invalid_argument("moment_integral_m2: n >= 0 required");
    if (!(q > 1.0)) throw std::domain_error("moment_integral_m2: q > 1 required");
    const double beta = detail::beta_of(q);
    const double gamma = detail::gamma_expq(q);
    const double eps_x = detail::ray_exclusion_delta(detail::dist_to_pi(theta));
    const detail::ExpqConstants ec = detail::expq_constants(q, eps_x);
    const double R0 = std::sqrt(q) / (q - 1.0);
    const double log_const = std::log((q - 1.0) / std::log(q));

    DecayEnvelope env;
    env.r0 = R0 / q;
    env.main.beta = beta;
    env.main.mu = n - 1.0 - gamma;
    env.main.log_c = log_const + ec.log_K0 - std::log(eps_x) -
                     beta * std::log(q) * std::log(q) - gamma * std::log(q);
    EnvelopeBranch small;
    small.mu = n;
    small.log_c = log_const - ec.log_C0;
    env.small = small;

    auto g = [n, q, log_const](Complex t) {
        const LogPolarPoint lp = LogPolarPoint::from_complex(t);
        const LogSeriesResult ex = exp_q_log(lp.scaled(std::log(q)), q, 1e-13);
        return detail::polar_value(n * lp.log_r - ex.log_mod + log_const, n * lp.arg - ex.arg);
    };
    return integrate_ray_rel(g, RaySpec{theta, {}, {}}, env, tol);
}

/// Prop-2 Cauchy kernel: (q/log q) int_{L_d} E_q(xi)/Theta_q(q omega xi / z) dxi
/// = z/(omega - z) for |omega/z| > q^{alpha - 1/2} and arg(omega/z) + d away
/// from +-pi.
inline QuadResult cauchy_kernel_theta(Complex omega, Complex z, double q, double d, double alpha,
                                      double tol, double margin = 0.3) {
    if (omega == z) throw std::domain_error("cauchy_kernel_theta: omega == z");
    if (omega == Complex(0, 0) || z == Complex(0, 0))
        throw std::domain_error("cauchy_kernel_theta: omega, z != 0 required");
    const Complex ratio = omega / z;
    const double psi = std::arg(ratio) + d;
    if (detail::dist_to_pi(psi) < margin)
        throw std::domain_error("cauchy_kernel_theta: arg(omega/z) + d too close to +-pi");
    if (!(std::abs(ratio) > std::pow(q, alpha - 0.5) * std::pow(q, 0.1)))
        throw std::domain_error("cauchy_kernel_theta: |omega/z| > q^{alpha-1/2} (with margin) required");

    const double log_b = std::log(q * std::abs(ratio));
    const double arg_b = std::arg(ratio);
    const double log_const = std::log(q / std::log(q));
    const DecayEnvelope env =
        detail::theta_ratio_envelope(q, 0.0, log_b, psi, 0, log_const);

    auto g = [q, log_b, arg_b, log_const](Complex xi) {
        const LogPolarPoint lp = LogPolarPoint::from_complex(xi);
        const LogSeriesResult num = e_q_log(lp, q, 1e-13);
        const LogSeriesResult den = theta_q_log(lp.scaled(log_b, arg_b), q, 1e-13);
        return detail::polar_value(num.log_mod - den.log_mod + log_const, num.arg - den.arg);
    };
    return integrate_ray_rel(g, RaySpec{d, {}, {}}, env, tol);
}

/// Prop-3 Cauchy kernel: ((q-1)/log q) int_{L_d} exp_q(xi)/exp_q(q omega xi/z) dxi
/// = z/(omega - z) for |omega/z| > 1.
inline QuadResult cauchy_kernel_expq(Complex omega, Complex z, double q, double d, double tol,
                                     double margin = 0.3) {
    if (omega == z) throw std::domain_error("cauchy_kernel_expq: omega == z");
    if (omega == Complex(0, 0) || z == Complex(0, 0))
        throw std::domain_error("cauchy_kernel_expq: omega, z != 0 required");
    const Complex ratio = omega / z;
    const double psi = std::arg(ratio) + d;
    if (detail::dist_to_pi(psi) < margin)
        throw std::domain_error("cauchy_kernel_expq: arg(omega/z) + d too close to +-pi");
    if (!(std::abs(ratio) > 1.1 - 1e-12))
        throw std::domain_error("cauchy_kernel_expq: |omega/z| > 1 (with safety factor 1.1) required");

    const double log_b = std::log(q * std::abs(ratio));
    const double arg_b = std::arg(ratio);
    const double log_const = std::log((q - 1.0) / std::log(q));
    const DecayEnvelope env = detail::expq_ratio_envelope(q, 0.0, log_b, psi, 0, log_const);

    auto g = [q, log_b, arg_b, log_const](Complex xi) {
        const LogPolarPoint lp = LogPolarPoint::from_complex(xi);
        const LogSeriesResult num = exp_q_log(lp, q, 1e-13);
        const LogSeriesResult den = exp_q_log(lp.scaled(log_b, arg_b), q, 1e-13);
        return detail::polar_value(num.log_mod - den.log_mod + log_const, num.arg - den.arg);
    };
    return integrate_ray_rel(g, RaySpec{d, {}, {}}, env, tol);
}

namespace detail {

inline void require_repr_radius(const FunctionSpec& f, double eps) {
    if (!(eps > 0.0) || !(eps < f.radius))
        throw std::domain_error("representation: eps in (0, radius) required for " + f.name);
}

}  // namespace detail

/// Theorem-1 representation of the k-fold tilde derivative:
/// (q / (2 log q pi i)) oint_{|w|=eps} f(w) int_{L_theta(w)}
///     zeta^k E_q(z zeta)/Theta_q(q w zeta) dzeta dw.
inline QuadResult qderiv_repr_m1(const FunctionSpec& f, Complex z, const ReprParams& params) {
    detail::require_repr_radius(f, params.eps);
    const double q = params.q;
    const int k = params.k;
    const double bound =
        std::pow(q, -k) * params.eps * std::min(1.0, std::pow(q, 0.5 - params.alpha));
    if (!(std::abs(z) < bound))
        throw std::domain_error("qderiv_repr_m1: |z| < q^{-k} eps min{1, q^{1/2-alpha}} violated");

    const double log_const = std::log(q / std::log(q));
    const double log_a = z == Complex(0, 0) ? -std::numeric_limits<double>::infinity()
                                            : std::log(std::abs(z));
    const double arg_z = z == Complex(0, 0) ? 0.0 : std::arg(z);
    const double log_b = std::log(q * params.eps);

    auto factory = [&, z, q, k](Complex w) {
        NestedInner inner;
        inner.prefactor = f.closed_form(w);
        inner.spec.theta = admissible_direction(std::arg(w), {}, params.margin);
        const double arg_w = std::arg(w);
        const double psi = arg_w + inner.spec.theta;  // Theta-argument angle, 0 by construction
        inner.env = detail::theta_ratio_envelope(q, log_a, log_b, psi, k, log_const);
        inner.g = [z, q, k, w, log_const, arg_z, log_a](Complex zeta) {
            const LogPolarPoint lp = LogPolarPoint::from_complex(zeta);
            double lm = k * lp.log_r + log_const;
            double ar = k * lp.arg;
            if (log_a != -std::numeric_limits<double>::infinity()) {
                const LogSeriesResult num = e_q_log(lp.scaled(log_a, arg_z), q, 1e-13);
                lm += num.log_mod;
                ar += num.arg;
            }
            const LogSeriesResult den =
                theta_q_log(lp.scaled(std::log(q * std::abs(w)), std::arg(w)), q, 1e-13);
            return detail::polar_value(lm - den.log_mod, ar - den.arg);
        };
        return inner;
    };
    return integrate_nested(params.eps, factory, params.tol);
}

/// Theorem-2 representation of the k-fold Jackson derivative:
/// ((q-1) / (2 log q pi i)) oint f(w) int zeta^k exp_q(z zeta)/exp_q(q w zeta).
inline QuadResult qderiv_repr_m2(const FunctionSpec& f, Complex z, const ReprParams& params) {
    detail::require_repr_radius(f, params.eps);
    const double q = params.q;
    const int k = params.k;
    if (!(std::abs(z) < std::pow(q, -k) * params.eps))
        throw std::domain_error("qderiv_repr_m2: |z| < q^{-k} eps violated");

    const double log_const = std::log((q - 1.0) / std::log(q));
    const double log_a = z == Complex(0, 0) ? -std::numeric_limits<double>::infinity()
                                            : std::log(std::abs(z));
    const double arg_z = z == Complex(0, 0) ? 0.0 : std::arg(z);
    const double log_b = std::log(q * params.eps);

    auto factory = [&, z, q, k](Complex w) {
        NestedInner inner;
        inner.prefactor = f.closed_form(w);
        inner.spec.theta = admissible_direction(std::arg(w), {}, params.margin);
        const double psi = std::arg(w) + inner.spec.theta;
        inner.env = detail::expq_ratio_envelope(q, log_a, log_b, psi, k, log_const);
        inner.g = [z, q, k, w, log_const, arg_z, log_a](Complex zeta) {
            const LogPolarPoint lp = LogPolarPoint::from_complex(zeta);
            double lm = k * lp.log_r + log_const;
            double ar = k * lp.arg;
            if (log_a != -std::numeric_limits<double>::infinity()) {
                const LogSeriesResult num = exp_q_log(lp.scaled(log_a, arg_z), q, 1e-13);
                lm += num.log_mod;
                ar += num.arg;
            }
            const LogSeriesResult den =
                exp_q_log(lp.scaled(std::log(q * std::abs(w)), std::arg(w)), q, 1e-13);
            return detail::polar_value(lm - den.log_mod, ar - den.arg);
        };
        return inner;
    };
    return integrate_nested(params.eps, factory, params.tol);
}

/// Corollary-1 representation of the k-fold (p,q)-derivative, 0 <= p < q.
/// p = 0 is the Theorem-1 form; p > 0 evaluates the exp_{q/p} form
/// ((q/p - 1)/(2 p^k log(q/p) pi i)) oint f(w) int zeta^k
///     exp_{q/p}(p^k z zeta)/exp_{q/p}((q/p) w zeta).
inline QuadResult pq_deriv_repr(const FunctionSpec& f, Complex z, double p, double q, int k,
                                const ReprParams& params) {
    if (!(p >= 0.0) || !(p < q))
        throw std::domain_error("pq_deriv_repr: 0 <= p < q required (swap arguments otherwise)");
    if (p == 0.0) {
        ReprParams pr = params;
        pr.q = q;
        pr.k = k;
        return qderiv_repr_m1(f, z, pr);
    }
    detail::require_repr_radius(f, params.eps);
    if (!(std::abs(z) < std::pow(q, -k) * params.eps))
        throw std::domain_error("pq_deriv_repr: |z| < q^{-k} eps violated");

    // D^k_{p,q} f(z) = p^{k(k-1)/2} D^k_{1,q/p} f(p^k z): the exp_{q/p} form
    // below is the Theorem-2 representation of that right-hand side, so the
    // rescaling factor enters the constant
    const double Q = q / p;
    const double log_const = std::log((Q - 1.0) / std::log(Q)) + 0.5 * k * (k - 1.0) * std::log(p);
    const Complex zs = std::pow(p, k) * z;
    const double log_a = zs == Complex(0, 0) ? -std::numeric_limits<double>::infinity()
                                             : std::log(std::abs(zs));
    const double arg_z = zs == Complex(0, 0) ? 0.0 : std::arg(zs);
    const double log_b = std::log(Q * params.eps);

    auto factory = [&, zs, Q, k](Complex w) {
        NestedInner inner;
        inner.prefactor = f.closed_form(w);
        inner.spec.theta = admissible_direction(std::arg(w), {}, params.margin);
        const double psi = std::arg(w) + inner.spec.theta;
        inner.env = detail::expq_ratio_envelope(Q, log_a, log_b, psi, k, log_const);
        inner.g = [zs, Q, k, w, log_const, arg_z, log_a](Complex zeta) {
            const LogPolarPoint lp = LogPolarPoint::from_complex(zeta);
            double lm = k * lp.log_r + log_const;
            double ar = k * lp.arg;
            if (log_a != -std::numeric_limits<double>::infinity()) {
                const LogSeriesResult num = exp_q_log(lp.scaled(log_a, arg_z), Q, 1e-13);
                lm += num.log_mod;
                ar += num.arg;
            }
            const LogSeriesResult den =
                exp_q_log(lp.scaled(std::log(Q * std::abs(w)), std::arg(w)), Q, 1e-13);
            return detail::polar_value(lm - den.log_mod, ar - den.arg);
        };
        return inner;
    };
    return integrate_nested(params.eps, factory, params.tol);
}

}  // namespace qcalc
