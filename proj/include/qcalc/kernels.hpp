#pragma once

// The (p,q) kernel functions: e1 and e2 whose moments are [n]_{p/q}! and
// q^{n(n-1)/2}, the convolution kernel e~ blending them (its moments are
// the (p,q)-factorials), and the Laplace-like operator T built on e~.
// Everything here requires p > q > 1.
//
// e~ itself is one ray integral of special-function values; its envelope is
// fitted on samples with the Gaussian rate 1/(2 log p) fixed (the rate the
// (p,q)-factorial moments force) and then validated like every other
// envelope. Kernel values are cached only for exactly repeated nodes;
// interpolation between nodes is deliberately not offered.

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "qcalc/repr.hpp"

namespace qcalc {

struct KernelParams {
    double p = 3.0;
    double q = 2.0;
    double phi = 0.0;    // convolution direction, != pi mod 2pi
    double theta = 0.0;  // T-operator direction
    double tol = 1e-8;
    double margin = 0.3;
    double c0 = 0.0;  // 0 picks the default 0.9 (1 - q/p)(q/p)

    void validate() const {
        QParams::pair(p, q).require_kernel_order();
        if (detail::dist_to_pi(phi) < margin)
            throw std::invalid_argument("KernelParams: phi must stay away from pi");
        const double c0_cap = (1.0 - q / p) * (q / p);
        if (c0 != 0.0 && !(c0 > 0.0 && c0 < c0_cap))
            throw std::invalid_argument("KernelParams: c0 in (0, (1-q/p)(q/p)) required");
        if (!(tol > 0.0)) throw std::invalid_argument("KernelParams: tol > 0 required");
    }

    double base_ratio() const { return p / q; }
    double c0_effective() const { return c0 != 0.0 ? c0 : 0.9 * (1.0 - q / p) * (q / p); }
    /// |z| cap for T: 0.5 min(p/q - 1, c0 p/q), our reading of "sufficiently small".
    double smallness_threshold() const {
        return 0.5 * std::min(p / q - 1.0, c0_effective() * p / q);
    }
};

/// e1(z) = ((p/q - 1)/(log p - log q)) / exp_{p/q}(p z / q); moments [n]_{p/q}!.
inline Complex kernel_e1(Complex z, const KernelParams& params, double exclusion = 1e-3) {
    params.validate();
    const double Q = params.base_ratio();
    const double c = (Q - 1.0) / std::log(Q);
    if (z == Complex(0.0, 0.0)) return Complex(c, 0.0);
    const Complex w = Q * z;
    if (nearest_zero_distance(ZeroFamily::exp_q, w, Q) < exclusion)
        throw std::domain_error("kernel_e1: pole proximity of 1/exp_{p/q}(pz/q)");
    const LogSeriesResult lg = exp_q_log(LogPolarPoint::from_complex(w), Q, 1e-13);
    return c * std::polar(std::exp(-lg.log_mod), -lg.arg);
}

/// e2(z) = (q/log q) / Theta_q(q z); moments q^{n(n-1)/2}.
inline Complex kernel_e2(Complex z, double q, double tol, double exclusion = 1e-3) {
    if (!(q > 1.0)) throw std::domain_error("kernel_e2: q > 1 required");
    if (z == Complex(0.0, 0.0))
        throw std::domain_error("kernel_e2: Theta_q has an essential singularity at 0");
    const Complex w = q * z;
    if (nearest_zero_distance(ZeroFamily::theta, w, q) < exclusion)
        throw std::domain_error("kernel_e2: pole proximity of 1/Theta_q(qz)");
    const LogSeriesResult lg = theta_q_log(LogPolarPoint::from_complex(w), q, std::min(tol, 1e-13));
    return (q / std::log(q)) * std::polar(std::exp(-lg.log_mod), -lg.arg);
}

namespace detail {

// envelope of h(w) = e1(w t) e2(1/w) / w along the ray arg w = phi, with
// t in log-polar form
inline DecayEnvelope etilde_integrand_envelope(const KernelParams& kp, LogPolarPoint t) {
    const double q = kp.q, Q = kp.base_ratio();
    const double beta_q = beta_of(q), beta_Q = beta_of(Q);
    const double gamma_Q = gamma_expq(Q);
    const double Lq = std::log(q);

    // |e2(1/w)| <= C2 exp(-beta_q v^2) rho^{3/2}, globally (v = log|w|);
    // the Theta argument q/w sits at angle -phi
    const double delta = ray_exclusion_delta(dist_to_pi(-kp.phi));
    const double log_dd = theta_lower_log_const(q, delta);
    const double log_c2 = std::log(q / Lq) - log_dd - beta_q * Lq * Lq - 0.5 * Lq;

    // |e1(w t)|: exp_Q argument Q w t at angle phi + arg t
    const double eps_x = ray_exclusion_delta(dist_to_pi(kp.phi + t.arg));
    const ExpqConstants ec = expq_constants(Q, eps_x);
    const double c_t = std::log(Q) + t.log_r;  // log |Q t|
    const double log_cQ = std::log((Q - 1.0) / std::log(Q));

    DecayEnvelope env;
    env.r0 = (std::sqrt(Q) / (Q - 1.0)) * std::exp(-c_t);
    env.main.beta = beta_q + beta_Q;
    env.main.mu = 0.5 - 2.0 * beta_Q * c_t - gamma_Q;  // 1.5 (e2) - gauss shift - 1 (dw/w)
    env.main.log_c =
        log_c2 + log_cQ + ec.log_K0 - std::log(eps_x) - beta_Q * c_t * c_t - gamma_Q * c_t;
    EnvelopeBranch small;
    small.beta = beta_q;
    small.mu = 0.5;
    small.log_c = log_c2 + log_cQ - ec.log_C0;
    env.small = small;
    return env;
}

struct EtildeEnvelopeFit {
    EnvelopeBranch main;   // with beta = 1/(2 log p)
    EnvelopeBranch small;  // |e~| <= c_s r near 0
};

}  // namespace detail

/// The convolution kernel e~(t) = t int_{L_phi} e1(w t) e2(1/w) dw/w, with a
/// per-instance cache for exactly repeated nodes and a fitted envelope for
/// the moment and T integrals.
class ConvolutionKernel {
   public:
    explicit ConvolutionKernel(KernelParams params) : params_(params) { params_.validate(); }

    const KernelParams& params() const { return params_; }

    /// e~ at one point of the surface.
    QuadResult eval(LogPolarPoint t, double rel_tol) const {
        const CacheKey k = key(t, rel_tol);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(k);
            if (it != cache_.end()) return it->second;
        }
        QuadResult out = eval_uncached(t, rel_tol, params_.phi);
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace(k, out);
        return out;
    }

    /// Direction override used by the phi-independence checks.
    QuadResult eval_with_phi(LogPolarPoint t, double rel_tol, double phi) const {
        return eval_uncached(t, rel_tol, phi);
    }

    /// Envelope of |e~| along arg t = arg_t, fitted with the Gaussian rate
    /// 1/(2 log p) fixed.
    detail::EtildeEnvelopeFit envelope(double arg_t) const {
        const long k = std::lround(arg_t * 1e9);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = env_cache_.find(k);
            if (it != env_cache_.end()) return it->second;
        }
        detail::EtildeEnvelopeFit fit = fit_envelope(arg_t);
        std::lock_guard<std::mutex> lock(mutex_);
        env_cache_.emplace(k, fit);
        return fit;
    }

   private:
    using CacheKey = std::tuple<long long, long long, long long>;

    static CacheKey key(LogPolarPoint t, double rel_tol) {
        static_assert(sizeof(double) == sizeof(long long));
        long long a, b, c;
        std::memcpy(&a, &t.log_r, sizeof a);
        std::memcpy(&b, &t.arg, sizeof b);
        std::memcpy(&c, &rel_tol, sizeof c);
        return {a, b, c};
    }

    QuadResult eval_uncached(LogPolarPoint t, double rel_tol, double phi) const {
        const KernelParams& kp = params_;
        if (detail::dist_to_pi(phi) < kp.margin)
            throw std::domain_error("convolution kernel: phi too close to pi");
        if (detail::dist_to_pi(phi + t.arg) < kp.margin)
            throw std::domain_error("convolution kernel: exp_{p/q} argument ray inadmissible");
        KernelParams kphi = kp;
        kphi.phi = phi;
        const DecayEnvelope env = detail::etilde_integrand_envelope(kphi, t);
        const double q = kp.q, Q = kp.base_ratio();
        const double log_cQ = std::log((Q - 1.0) / std::log(Q));
        const double log_c2 = std::log(q / std::log(q));
        auto g = [t, q, Q, log_cQ, log_c2](Complex w) {
            const LogPolarPoint lw = LogPolarPoint::from_complex(w);
            const LogSeriesResult den1 =
                exp_q_log({std::log(Q) + lw.log_r + t.log_r, lw.arg + t.arg}, Q, 1e-13);
            const LogSeriesResult den2 = theta_q_log({std::log(q) - lw.log_r, -lw.arg}, q, 1e-13);
            const double lm = log_cQ + log_c2 - den1.log_mod - den2.log_mod - lw.log_r;
            return detail::polar_value(lm, -den1.arg - den2.arg - lw.arg);
        };
        QuadResult r = integrate_ray_rel(g, RaySpec{phi, {}, {}}, env, rel_tol);
        const Complex tc = t.to_complex();
        r.value *= tc;
        r.abs_error_estimate *= std::abs(tc);
        return r;
    }

    detail::EtildeEnvelopeFit fit_envelope(double arg_t) const {
        const double beta = detail::beta_of(params_.p);
        std::vector<double> xs, ys;
        double small_c = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 34; ++i) {
            const double v = -3.0 + 17.0 * i / 34.0;
            const QuadResult r = eval_uncached({v, arg_t}, 1e-9, params_.phi);
            const double av = std::abs(r.value);
            if (!(av > 0.0)) continue;
            if (v <= 0.0) small_c = std::max(small_c, std::log(av) - v);
            xs.push_back(v);
            ys.push_back(std::log(av) + beta * v * v);
        }
        const detail::LinearFit lf = detail::least_squares(xs, ys);
        double worst = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            worst = std::max(worst, ys[i] - (lf.intercept + lf.slope * xs[i]));

        detail::EtildeEnvelopeFit fit;
        fit.main.beta = beta;
        fit.main.mu = lf.slope;
        fit.main.log_c = lf.intercept + worst + 0.3;
        fit.small.beta = 0.0;
        fit.small.mu = 1.0;
        fit.small.log_c = small_c + 0.3;
        return fit;
    }

    KernelParams params_;
    mutable std::mutex mutex_;
    mutable std::map<CacheKey, QuadResult> cache_;
    mutable std::map<long, detail::EtildeEnvelopeFit> env_cache_;
};

/// One-shot evaluation of the convolution kernel.
inline QuadResult convolution_kernel(LogPolarPoint t, const KernelParams& params) {
    return ConvolutionKernel(params).eval(t, params.tol);
}

enum class MomentPath { factorized, convolved };

/// [n]_{p,q}! as a kernel moment: the factorized path multiplies the two
/// one-dimensional moment integrals ([n]_{p/q}! and q^{n(n-1)/2}); the
/// convolved path integrates x^{n-1} e~(x) along the positive axis.
inline QuadResult pq_moment_via_kernel(int n, const KernelParams& params, MomentPath path) {
    params.validate();
    if (n < 1) throw std::invalid_argument("pq_moment_via_kernel: n >= 1 required");
    if (path == MomentPath::factorized) {
        const QuadResult a = moment_integral_m2(n, params.base_ratio(), 0.0, params.tol);
        const QuadResult b = moment_integral_m1(n, params.q, 0.0, params.tol);
        QuadResult out;
        out.value = a.value * b.value;
        out.abs_error_estimate = std::abs(a.value) * b.abs_error_estimate +
                                 std::abs(b.value) * a.abs_error_estimate;
        out.nodes_used = a.nodes_used + b.nodes_used;
        return out;
    }
    ConvolutionKernel kernel(params);
    const detail::EtildeEnvelopeFit fit = kernel.envelope(0.0);
    DecayEnvelope env;
    env.main = fit.main;
    env.main.mu += n - 1;
    env.r0 = 1.0;
    EnvelopeBranch small = fit.small;
    small.mu += n - 1;
    env.small = small;

    const double inner_rel = std::max(1e-11, 3e-3 * params.tol);
    long inner_nodes = 0;
    auto g = [&](Complex x) {
        const QuadResult r = kernel.eval(LogPolarPoint::from_complex(x), inner_rel);
        inner_nodes += r.nodes_used;
        return std::pow(x, n - 1) * r.value;
    };
    QuadResult out = integrate_ray_rel(g, RaySpec{0.0, {}, {}}, env, params.tol);
    out.nodes_used += inner_nodes;
    return out;
}

/// Function on a sector of the surface together with its growth-class
/// witness: |f(z)| <= c e^{omega_M(|z|/k)} on proper subsectors.
struct SectorFunction {
    std::function<Complex(LogPolarPoint)> evaluator;
    double sector_dir = 0.0;
    double sector_opening = M_PI;
    MomentSequence witness_M;
    double witness_k = 1.5;
    std::optional<double> poly_degree;  // set when |f| grows like r^d exactly

    SectorFunction(std::function<Complex(LogPolarPoint)> f, double dir, double opening,
                   MomentSequence M, double k)
        : evaluator(std::move(f)),
          sector_dir(dir),
          sector_opening(opening),
          witness_M(std::move(M)),
          witness_k(k) {}

    static SectorFunction monomial(int n, const KernelParams& kp, double k = 1.5) {
        SectorFunction f([n](LogPolarPoint u) { return std::pow(u.to_complex(), n); }, 0.0,
                         M_PI, MomentSequence::m_pq(kp.p, kp.q), k);
        f.poly_degree = n;
        return f;
    }
};

/// T(f)(z) = int_{L_theta} f(u) e~(u/z) du/u for f in the m_pq growth class
/// with k > 1 and |z| below the smallness threshold.
inline QuadResult laplace_like_T(const SectorFunction& f, LogPolarPoint z,
                                 const KernelParams& params) {
    params.validate();
    if (!(f.witness_k > 1.0)) throw std::domain_error("laplace_like_T: witness k > 1 required");
    const double az = std::exp(z.log_r);
    if (!(az < params.smallness_threshold()))
        throw std::domain_error("laplace_like_T: |z| below the smallness threshold required");
    if (std::abs(detail::wrap_angle(params.theta - f.sector_dir)) > 0.5 * f.sector_opening)
        throw std::domain_error("laplace_like_T: theta outside the sector");
    const FitResult witness = check_class_membership(f.evaluator, f.sector_dir, f.sector_opening,
                                                     f.witness_M, f.witness_k, 200);
    if (!witness.pass) throw std::domain_error("laplace_like_T: class-witness failure");

    ConvolutionKernel kernel(params);
    const double arg_t = params.theta - z.arg;  // argument of u/z along the ray
    const detail::EtildeEnvelopeFit fit = kernel.envelope(arg_t);

    // envelope of f(u) e~(u/z) / u in v = log|u|; a = log|z|
    const double a = z.log_r;
    DecayEnvelope env;
    env.r0 = 1.0;
    EnvelopeBranch small;
    if (f.poly_degree) {
        const double d = *f.poly_degree;
        // |f| <= c_d r^d with c_d from a short scan along the ray
        double log_cd = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 8; ++i) {
            const double v = -4.0 + i;
            log_cd = std::max(log_cd,
                              std::log(std::abs(f.evaluator({v, params.theta}))) - d * v);
        }
        log_cd += 0.1;
        env.main.beta = fit.main.beta;
        env.main.mu = d + fit.main.mu + 2.0 * fit.main.beta * a - 1.0;
        env.main.log_c = log_cd + fit.main.log_c - fit.main.mu * a - fit.main.beta * a * a;
        small.mu = d + fit.small.mu - 1.0;
        small.log_c = log_cd + fit.small.log_c - fit.small.mu * a;
    } else {
        // class bound e^{omega(r/k)} <= p^{1/8} exp(log^2(r/k)/(2 log p)) (r/k)^{1/2}
        // (from log m_pq(n) >= n(n-1)/2 log p); the log^2 terms cancel
        // against the kernel envelope, leaving a pure power of r
        const double log_c_f = std::log(std::max(witness.constants.at("c"), 1e-300));
        const double beta = detail::beta_of(params.p);
        const double b = std::log(f.witness_k);
        const double mu = 0.5 + fit.main.mu + 2.0 * beta * (a - b) - 1.0;
        if (!(mu < -1.0))
            throw std::domain_error(
                "laplace_like_T: |z| too large for the class witness (non-integrable tail)");
        env.main.beta = 0.0;
        env.main.mu = mu;
        env.main.log_c = log_c_f + std::log(params.p) / 8.0 - 0.5 * b + fit.main.log_c -
                         fit.main.mu * a + beta * (b * b - a * a);
        small.mu = fit.small.mu - 1.0;
        small.log_c = log_c_f + fit.small.log_c - fit.small.mu * a;
    }
    env.small = small;

    const double inner_rel = std::max(1e-11, 3e-3 * params.tol);
    long inner_nodes = 0;
    auto g = [&](Complex u) {
        const LogPolarPoint lu = LogPolarPoint::from_complex(u);
        // keep the unreduced ray argument so u/z stays on the right sheet
        const LogPolarPoint ut{lu.log_r - z.log_r, params.theta - z.arg};
        const QuadResult r = kernel.eval(ut, inner_rel);
        inner_nodes += r.nodes_used;
        return f.evaluator({lu.log_r, params.theta}) * r.value / u;
    };
    QuadResult out = integrate_ray_rel(g, RaySpec{params.theta, {}, {}}, env, params.tol);
    out.nodes_used += inner_nodes;
    return out;
}

}  // namespace qcalc
