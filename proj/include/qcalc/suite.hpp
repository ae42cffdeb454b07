#pragma once

// Batch verification driver: builds the named check suites, runs them
// deterministically, and serializes machine-diffable JSON reports. The
// serialized artifact carries no wall-clock fields, so reruns with the same
// config and seed are byte-identical; runtimes stay on the in-memory
// reports for the human-readable table.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcalc/kernels.hpp"

namespace qcalc {

enum class Suite { special, moments, cauchy, theorems, kernel, bounds, all };

inline Suite suite_from_name(const std::string& name) {
    if (name == "special") return Suite::special;
    if (name == "moments") return Suite::moments;
    if (name == "cauchy") return Suite::cauchy;
    if (name == "theorems") return Suite::theorems;
    if (name == "kernel") return Suite::kernel;
    if (name == "bounds") return Suite::bounds;
    if (name == "all") return Suite::all;
    throw std::invalid_argument("unknown suite: " + name);
}

struct RunConfig {
    double q = 2.0;
    double p = 3.0;
    double tol_series = 1e-12;
    double tol_quad = 1e-8;
    double eps_contour = 0.5;
    double margin = 0.3;
    std::string alpha_policy = "estimate";  // "estimate" or a number
    int k_max = 3;
    long seed = 7;

    void validate() const {
        if (!(q > 1.0)) throw std::invalid_argument("config: q > 1 required");
        if (!(p >= 0.0) || p == q) throw std::invalid_argument("config: p >= 0, p != q required");
        if (!(tol_series > 0.0) || !(tol_quad > 0.0))
            throw std::invalid_argument("config: tolerances must be positive");
        if (!(eps_contour > 0.0)) throw std::invalid_argument("config: eps_contour > 0 required");
        if (!(margin > 0.0) || !(margin < 1.5))
            throw std::invalid_argument("config: margin in (0, 1.5) required");
        if (k_max < 0 || k_max > 4) throw std::invalid_argument("config: k_max in [0, 4] required");
        if (alpha_policy != "estimate") {
            std::size_t pos = 0;
            (void)std::stod(alpha_policy, &pos);
            if (pos != alpha_policy.size())
                throw std::invalid_argument("config: alpha_policy is 'estimate' or a number");
        }
    }

    double resolve_alpha(double base_q) const {
        if (alpha_policy == "estimate") return estimated_alpha(base_q);
        return std::stod(alpha_policy);
    }
};

namespace detail {

inline std::string fmt_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

struct CheckTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

// exp_{1/q}(w) summed directly from its own coefficients
// q^{n(n-1)/2}/[n]_q!; converges for |w| < q/(q-1) and provides the route
// independent of the reciprocal identity
inline Complex exp_inv_base_series(Complex w, double q) {
    Complex s(0, 0), t(1, 0);
    for (int n = 0; n < 400; ++n) {
        s += t;
        t *= w * std::pow(q, n) / q_number(n + 1, q);
        if (n > 4 && std::abs(t) < 1e-18 * std::abs(s)) break;
    }
    return s;
}

inline void push_sorted(std::vector<CheckReport>& out) {
    std::stable_sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) {
        return a.check_id < b.check_id;
    });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// suite builders
// ---------------------------------------------------------------------------

/// Theta functional equation and the exp_q reciprocal identity.
inline std::vector<CheckReport> run_suite_special(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const std::vector<double> qs{1.5, 2.0, 3.0};

    for (double q : qs) {
        for (int m = -3; m <= 3; ++m) {
            detail::CheckTimer timer;
            detail::Sampler2 s(static_cast<int>(cfg.seed) + m + 10);
            double worst = 0.0;
            for (int i = 0; i < 50; ++i) {
                const auto [a, b] = s.next();
                const Complex z = std::polar(0.1 * std::pow(100.0, a), M_PI * (2.0 * b - 1.0));
                const Complex lhs =
                    theta_q(LogPolarPoint::from_complex(std::pow(q, m) * z), q, cfg.tol_series).value;
                const Complex rhs = std::pow(q, 0.5 * m * (m + 1.0)) * std::pow(z, m) *
                                    theta_q(LogPolarPoint::from_complex(z), q, cfg.tol_series).value;
                worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
            }
            std::ostringstream id;
            id << "special.theta_funceq.q" << q << ".m" << (m < 0 ? "m" : "p") << std::abs(m);
            CheckReport rep = make_check(id.str(), 0.0, worst, 1e-11);
            rep.params["q"] = detail::fmt_double(q);
            rep.params["m"] = std::to_string(m);
            rep.params["samples"] = "50";
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }

        {  // inversion identity rides along with the functional equation
            detail::CheckTimer timer;
            detail::Sampler2 s(static_cast<int>(cfg.seed) + 99);
            double worst = 0.0;
            for (int i = 0; i < 50; ++i) {
                const auto [a, b] = s.next();
                const Complex z = std::polar(0.1 * std::pow(100.0, a), 0.9 * M_PI * (2.0 * b - 1.0));
                const Complex lhs =
                    theta_q(LogPolarPoint::from_complex(1.0 / z), q, cfg.tol_series).value;
                const Complex rhs =
                    theta_q(LogPolarPoint::from_complex(z / q), q, cfg.tol_series).value;
                worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
            }
            std::ostringstream id;
            id << "special.theta_inversion.q" << q;
            CheckReport rep = make_check(id.str(), 0.0, worst, 1e-11);
            rep.params["q"] = detail::fmt_double(q);
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }

        {  // reciprocal identity, direct series inside its disk
            detail::CheckTimer timer;
            detail::Sampler2 s(static_cast<int>(cfg.seed) + 7);
            double worst = 0.0;
            int kept = 0;
            while (kept < 100) {
                const auto [a, b] = s.next();
                const double r = 1e-3 + (2.5 / (q - 1.0)) * a;
                const Complex t = std::polar(r, M_PI * (2.0 * b - 1.0));
                if (nearest_zero_distance(ZeroFamily::exp_q, q * t, q) <= 0.1) continue;
                ++kept;
                const Complex lhs = exp_q_entire(q * t, q, cfg.tol_series).value;
                const Complex rec = exp_q_reciprocal(t, q, cfg.tol_series);
                worst = std::max(worst, std::abs(lhs * rec - 1.0));
                if (r < 0.8 / (q - 1.0)) {
                    const Complex direct = detail::exp_inv_base_series(-q * t, q);
                    worst = std::max(worst, std::abs(lhs * direct - 1.0));
                    worst = std::max(worst, std::abs(rec - direct) / std::abs(direct));
                }
            }
            std::ostringstream id;
            id << "special.reciprocal.q" << q;
            CheckReport rep = make_check(id.str(), 0.0, worst, 1e-10);
            rep.params["q"] = detail::fmt_double(q);
            rep.params["samples"] = "100";
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
    }
    detail::push_sorted(out);
    return out;
}

/// Moment identities for q^{n(n-1)/2} and [n]_q!, with direction checks.
inline std::vector<CheckReport> run_suite_moments(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    for (double q : {1.5, 2.0}) {
        for (int n = 0; n <= 10; ++n) {
            for (int kind = 0; kind < 2; ++kind) {
                const char* tag = kind == 0 ? "m1" : "m2";
                const double want = kind == 0 ? std::pow(q, 0.5 * n * (n - 1.0))
                                              : q_factorial(n, q, FactorialMode::linear);
                detail::CheckTimer timer;
                const QuadResult r = kind == 0 ? moment_integral_m1(n, q, 0.0, cfg.tol_quad)
                                               : moment_integral_m2(n, q, 0.0, cfg.tol_quad);
                std::ostringstream id;
                id << "moments." << tag << ".q" << q << ".n" << std::setw(2) << std::setfill('0')
                   << n;
                CheckReport rep = make_check(id.str(), want, r.value, 1e-8, r.abs_error_estimate);
                rep.params["q"] = detail::fmt_double(q);
                rep.params["n"] = std::to_string(n);
                rep.runtime_ms = timer.elapsed_ms();
                out.push_back(rep);

                // direction independence within 3x the summed estimates
                detail::CheckTimer timer2;
                const QuadResult rm = kind == 0 ? moment_integral_m1(n, q, -0.4, cfg.tol_quad)
                                                : moment_integral_m2(n, q, -0.4, cfg.tol_quad);
                const QuadResult rp = kind == 0 ? moment_integral_m1(n, q, 0.4, cfg.tol_quad)
                                                : moment_integral_m2(n, q, 0.4, cfg.tol_quad);
                const double est =
                    r.abs_error_estimate + rm.abs_error_estimate + rp.abs_error_estimate;
                const double spread = std::max(std::abs(rm.value - r.value),
                                               std::abs(rp.value - r.value));
                std::ostringstream id2;
                id2 << "moments.dir." << tag << ".q" << q << ".n" << std::setw(2)
                    << std::setfill('0') << n;
                CheckReport rep2 = make_check(id2.str(), 0.0, spread, 0.0, 0.3 * est);
                rep2.params["q"] = detail::fmt_double(q);
                rep2.params["n"] = std::to_string(n);
                rep2.params["directions"] = "-0.4,0,0.4";
                rep2.runtime_ms = timer2.elapsed_ms();
                out.push_back(rep2);
            }
        }
    }
    detail::push_sorted(out);
    return out;
}

/// Cauchy kernels against the closed form z/(omega - z).
inline std::vector<CheckReport> run_suite_cauchy(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const std::vector<double> qs{1.5, 2.0, 3.0};
    for (int variant = 0; variant < 2; ++variant) {
        detail::Sampler2 s(static_cast<int>(cfg.seed) + 31 * (variant + 1));
        for (int i = 0; i < 30; ++i) {
            const double q = qs[static_cast<std::size_t>(i % 3)];
            const double alpha = cfg.resolve_alpha(q);
            const auto [a, b] = s.next();
            const auto [c, d4] = s.next();
            const double floor_ratio =
                variant == 0 ? std::pow(q, alpha - 0.5) * std::pow(q, 0.1) : 1.1;
            const double ratio = floor_ratio * (1.25 + 3.0 * a);
            const Complex z = std::polar(0.3 + 1.2 * c, M_PI * (2.0 * d4 - 1.0));
            const Complex omega = z * std::polar(ratio, 1.6 * (2.0 * b - 1.0));
            const double dir = -std::arg(omega / z);  // maximally admissible

            detail::CheckTimer timer;
            const QuadResult r =
                variant == 0
                    ? cauchy_kernel_theta(omega, z, q, dir, alpha, cfg.tol_quad, cfg.margin)
                    : cauchy_kernel_expq(omega, z, q, dir, cfg.tol_quad, cfg.margin);
            const Complex want = z / (omega - z);
            std::ostringstream id;
            id << "cauchy." << (variant == 0 ? "theta" : "expq") << ".t" << std::setw(2)
               << std::setfill('0') << i;
            CheckReport rep = make_check(id.str(), want, r.value, 1e-7, r.abs_error_estimate);
            rep.params["q"] = detail::fmt_double(q);
            rep.params["ratio"] = detail::fmt_double(ratio);
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
    }
    detail::push_sorted(out);
    return out;
}

/// Nested contour representations against the pointwise oracles.
inline std::vector<CheckReport> run_suite_theorems(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const int k_hi = std::min(2, cfg.k_max);
    for (double q : {1.5, 2.0}) {
        const auto cs = corpus(q, cfg.tol_series);
        const double alpha = cfg.resolve_alpha(q);
        for (const auto& f : cs) {
            if (!(f.radius > 0.6)) continue;
            for (int k = 0; k <= k_hi; ++k) {
                ReprParams pr;
                pr.q = q;
                pr.k = k;
                pr.eps = cfg.eps_contour;
                pr.alpha = alpha;
                pr.margin = cfg.margin;
                pr.tol = cfg.tol_quad;
                const double bound_m1 =
                    std::pow(q, -k) * pr.eps * std::min(1.0, std::pow(q, 0.5 - alpha));
                const double tol = k <= 1 ? 1e-6 : 1e-5;
                detail::Sampler2 s(static_cast<int>(cfg.seed) + 13 * k + static_cast<int>(10 * q));

                double worst1 = 0.0, worst2 = 0.0, est1 = 0.0, est2 = 0.0;
                detail::CheckTimer timer;
                for (int i = 0; i < 5; ++i) {
                    const auto [a, b] = s.next();
                    const Complex z =
                        std::polar(bound_m1 * (0.25 + 0.25 * a), M_PI * (2.0 * b - 1.0));
                    // a vanishing oracle (constant member, k >= 1) switches
                    // the comparison to an absolute one on the unit scale
                    const QuadResult r1 = qderiv_repr_m1(f, z, pr);
                    const Complex o1 = tilde_dq(f, z, q, k);
                    const double s1 = std::abs(o1) < 1e-9 ? 1.0 : std::abs(o1);
                    worst1 = std::max(worst1, std::abs(r1.value - o1) / s1);
                    est1 = std::max(est1, r1.abs_error_estimate / s1);
                    const QuadResult r2 = qderiv_repr_m2(f, z, pr);
                    const Complex o2 = jackson_dq(f, z, q, k);
                    const double s2 = std::abs(o2) < 1e-9 ? 1.0 : std::abs(o2);
                    worst2 = std::max(worst2, std::abs(r2.value - o2) / s2);
                    est2 = std::max(est2, r2.abs_error_estimate / s2);
                }
                std::ostringstream id1, id2;
                id1 << "theorems.m1." << f.name << ".q" << q << ".k" << k;
                id2 << "theorems.m2." << f.name << ".q" << q << ".k" << k;
                CheckReport rep1 = make_check(id1.str(), 0.0, worst1, tol, 0.1 * est1);
                rep1.params["q"] = detail::fmt_double(q);
                rep1.params["k"] = std::to_string(k);
                rep1.runtime_ms = timer.elapsed_ms();
                out.push_back(rep1);
                CheckReport rep2 = make_check(id2.str(), 0.0, worst2, tol, 0.1 * est2);
                rep2.params["q"] = detail::fmt_double(q);
                rep2.params["k"] = std::to_string(k);
                rep2.runtime_ms = timer.elapsed_ms();
                out.push_back(rep2);
            }
        }
    }

    // corollary branches: p = 0 and p = 1 agree with the theorem paths;
    // a generic 0 < p < q case checks against the pointwise oracle
    {
        const double q = 2.0;
        const auto cs = corpus(q, cfg.tol_series);
        const double alpha = cfg.resolve_alpha(q);
        for (const auto& f : cs) {
            if (!(f.radius > 0.6)) continue;
            for (int k = 0; k <= std::min(1, cfg.k_max); ++k) {
                ReprParams pr;
                pr.q = q;
                pr.k = k;
                pr.eps = cfg.eps_contour;
                pr.alpha = alpha;
                pr.margin = cfg.margin;
                pr.tol = cfg.tol_quad;
                const Complex z(0.2 * std::pow(q, -k) * pr.eps *
                                    std::min(1.0, std::pow(q, 0.5 - alpha)),
                                0.01);
                detail::CheckTimer timer;
                const QuadResult a0 = pq_deriv_repr(f, z, 0.0, q, k, pr);
                const QuadResult b0 = qderiv_repr_m1(f, z, pr);
                const QuadResult a1 = pq_deriv_repr(f, z, 1.0, q, k, pr);
                const QuadResult b1 = qderiv_repr_m2(f, z, pr);
                const double branch_err =
                    std::max(std::abs(a0.value - b0.value) / std::max(1e-9, std::abs(b0.value)),
                             std::abs(a1.value - b1.value) / std::max(1e-9, std::abs(b1.value)));
                std::ostringstream idb;
                idb << "theorems.coro.branches." << f.name << ".k" << k;
                CheckReport repb = make_check(idb.str(), 0.0, branch_err, 1e-7);
                repb.params["k"] = std::to_string(k);
                repb.runtime_ms = timer.elapsed_ms();
                out.push_back(repb);

                // generic (p, q) = (cfg.q, cfg.p) ordered upward
                const double pp = std::min(cfg.q, cfg.p), qq = std::max(cfg.q, cfg.p);
                if (pp > 0.0 && qq > 1.0 && pp < qq) {
                    ReprParams pg = pr;
                    pg.q = qq;
                    const Complex zg(0.2 * std::pow(qq, -k) * pg.eps, 0.005);
                    detail::CheckTimer timer2;
                    const QuadResult rg = pq_deriv_repr(f, zg, pp, qq, k, pg);
                    const Complex og = pq_derivative(f, zg, pp, qq, k);
                    const double sg = std::abs(og) < 1e-9 ? 1.0 : std::abs(og);
                    std::ostringstream idg;
                    idg << "theorems.coro.pq." << f.name << ".k" << k;
                    CheckReport repg = make_check(idg.str(), 0.0,
                                                  std::abs(rg.value - og) / sg, k <= 1 ? 1e-6 : 1e-5,
                                                  0.1 * rg.abs_error_estimate / sg);
                    repg.params["p"] = detail::fmt_double(pp);
                    repg.params["q"] = detail::fmt_double(qq);
                    repg.params["k"] = std::to_string(k);
                    repg.runtime_ms = timer2.elapsed_ms();
                    out.push_back(repg);
                }
            }
        }
    }
    detail::push_sorted(out);
    return out;
}

/// Convolution-kernel moments and the Laplace-like operator.
inline std::vector<CheckReport> run_suite_kernel(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    KernelParams kp;
    kp.p = std::max(cfg.p, cfg.q);
    kp.q = std::min(cfg.p, cfg.q);
    kp.margin = cfg.margin;
    kp.tol = cfg.tol_quad;
    kp.validate();

    for (int n = 1; n <= 6; ++n) {
        const double want = pq_factorial(n, kp.p, kp.q, FactorialMode::linear);
        {
            detail::CheckTimer timer;
            const QuadResult r = pq_moment_via_kernel(n, kp, MomentPath::factorized);
            std::ostringstream id;
            id << "kernel.moment.fact.n" << n;
            CheckReport rep = make_check(id.str(), want, r.value, 1e-8, r.abs_error_estimate);
            rep.params["n"] = std::to_string(n);
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
        {
            detail::CheckTimer timer;
            KernelParams kc = kp;
            kc.tol = std::max(cfg.tol_quad, 1e-6);
            const QuadResult rc = pq_moment_via_kernel(n, kc, MomentPath::convolved);
            std::ostringstream id;
            id << "kernel.moment.conv.n" << n;
            CheckReport rep = make_check(id.str(), want, rc.value, 1e-3, rc.abs_error_estimate);
            rep.params["n"] = std::to_string(n);
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);

            const QuadResult rf = pq_moment_via_kernel(n, kp, MomentPath::factorized);
            std::ostringstream id2;
            id2 << "kernel.moment.consistency.n" << n;
            CheckReport rep2 =
                make_check(id2.str(), 0.0, std::abs(rc.value - rf.value) / want, 0.0,
                           0.3 * (rc.abs_error_estimate + rf.abs_error_estimate) / want);
            rep2.params["n"] = std::to_string(n);
            rep2.runtime_ms = timer.elapsed_ms();
            out.push_back(rep2);
        }
    }

    {  // T on monomials at three admissible points
        KernelParams kt = kp;
        kt.tol = std::max(cfg.tol_quad, 1e-6);
        for (int n = 1; n <= 4; ++n) {
            detail::CheckTimer timer;
            const SectorFunction f = SectorFunction::monomial(n, kt);
            double worst = 0.0, est = 0.0;
            const double fac = pq_factorial(n, kt.p, kt.q, FactorialMode::linear);
            for (double arg_z : {0.0, 0.5, -0.9}) {
                const LogPolarPoint z{std::log(0.45 * kt.smallness_threshold()), arg_z};
                const QuadResult r = laplace_like_T(f, z, kt);
                const Complex want = fac * std::pow(z.to_complex(), n);
                worst = std::max(worst, std::abs(r.value - want) / std::abs(want));
                est = std::max(est, r.abs_error_estimate / std::abs(want));
            }
            std::ostringstream id;
            id << "kernel.T.n" << n;
            CheckReport rep = make_check(id.str(), 0.0, worst, 1e-3, 0.1 * est);
            rep.params["n"] = std::to_string(n);
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
    }

    {  // e~ direction independence at five moduli
        detail::CheckTimer timer;
        ConvolutionKernel kernel(kp);
        double worst = 0.0, est = 0.0;
        for (double v : {-1.0, -0.3, 0.0, 0.7, 1.5}) {
            const QuadResult a = kernel.eval_with_phi({v, 0.0}, 1e-9, -0.3);
            const QuadResult b = kernel.eval_with_phi({v, 0.0}, 1e-9, 0.0);
            const QuadResult c = kernel.eval_with_phi({v, 0.0}, 1e-9, 0.3);
            const double scale = std::max(std::abs(b.value), 1e-30);
            worst = std::max(worst, std::max(std::abs(a.value - b.value),
                                             std::abs(c.value - b.value)) /
                                        scale);
            est = std::max(est, (a.abs_error_estimate + b.abs_error_estimate +
                                 c.abs_error_estimate) /
                                    scale);
        }
        CheckReport rep = make_check("kernel.etilde.dirindep", 0.0, worst, 0.0, 0.3 * est);
        rep.runtime_ms = timer.elapsed_ms();
        out.push_back(rep);
    }

    {  // positivity probe on the positive axis
        detail::CheckTimer timer;
        ConvolutionKernel kernel(kp);
        double worst = 0.0, est = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double v = -2.0 + 0.45 * i;
            const QuadResult r = kernel.eval({v, 0.0}, 1e-9);
            worst = std::max(worst, std::abs(r.value.imag()) / std::abs(r.value));
            est = std::max(est, r.abs_error_estimate / std::abs(r.value));
        }
        CheckReport rep = make_check("kernel.etilde.positivity", 0.0, worst, 1e-12, 0.3 * est);
        rep.runtime_ms = timer.elapsed_ms();
        out.push_back(rep);
    }
    detail::push_sorted(out);
    return out;
}

/// Growth-bound certificates.
inline std::vector<CheckReport> run_suite_bounds(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    for (double q : {1.5, 2.0, 3.0}) {
        {
            detail::CheckTimer timer;
            const FitResult fit = estimate_alpha_Eq(q, 1.0, 1e6, 6, {}, static_cast<int>(cfg.seed));
            std::ostringstream id;
            id << "bounds.lemma2.q" << q;
            CheckReport rep = make_check(id.str(), 0.0, fit.constants.at("violations"), 0.5);
            rep.params["q"] = detail::fmt_double(q);
            rep.params["alpha"] = detail::fmt_double(fit.constants.at("alpha"));
            rep.params["K"] = detail::fmt_double(fit.constants.at("K"));
            rep.pass = rep.pass && fit.pass;
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
        {
            detail::CheckTimer timer;
            std::vector<double> fits;
            for (double d : {0.05, 0.1, 0.2})
                fits.push_back(validate_theta_lower_bound(q, d, 500).computed.v.real());
            const double lo = *std::min_element(fits.begin(), fits.end());
            const double hi = *std::max_element(fits.begin(), fits.end());
            std::ostringstream id;
            id << "bounds.lemma1.q" << q;
            CheckReport rep = make_check(id.str(), 1.0, hi / lo, 1.0);
            rep.params["q"] = detail::fmt_double(q);
            rep.params["Delta_low"] = detail::fmt_double(lo);
            rep.params["Delta_high"] = detail::fmt_double(hi);
            rep.pass = rep.pass && lo > 0.0;
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
        {
            detail::CheckTimer timer;
            const CheckReport inner = validate_expq_bounds(q, 0.1, 500);
            std::ostringstream id;
            id << "bounds.prop1.q" << q;
            CheckReport rep = make_check(id.str(), 1.0, inner.pass ? 1.0 : 0.0, 0.0);
            rep.params = inner.params;
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
        {
            detail::CheckTimer timer;
            const FitResult fit = estimate_cq_limit(q, 100);
            std::ostringstream id;
            id << "bounds.cq.q" << q;
            CheckReport rep =
                make_check(id.str(), 0.0, fit.constants.at("last_increment"), 1e-12);
            rep.params["q"] = detail::fmt_double(q);
            rep.params["c_q"] = detail::fmt_double(fit.constants.at("c_q"));
            rep.pass = rep.pass && fit.pass;
            rep.runtime_ms = timer.elapsed_ms();
            out.push_back(rep);
        }
    }
    {  // submultiplicativity on the 16-point grid, with the m_pq split
        detail::CheckTimer timer;
        const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
        CheckReport rep = check_weight_submultiplicativity(
            MomentSequence::m2(std::max(cfg.p, cfg.q) / std::min(cfg.p, cfg.q)),
            MomentSequence::m1(std::min(cfg.p, cfg.q)), grid, grid);
        rep.check_id = "bounds.lemma4.grid16";
        rep.runtime_ms = timer.elapsed_ms();
        out.push_back(rep);
    }
    detail::push_sorted(out);
    return out;
}

inline std::vector<CheckReport> run_suite(const RunConfig& cfg, Suite suite) {
    cfg.validate();
    std::vector<CheckReport> out;
    auto append = [&out](std::vector<CheckReport> v) {
        out.insert(out.end(), v.begin(), v.end());
    };
    switch (suite) {
        case Suite::special:
            return run_suite_special(cfg);
        case Suite::moments:
            return run_suite_moments(cfg);
        case Suite::cauchy:
            return run_suite_cauchy(cfg);
        case Suite::theorems:
            return run_suite_theorems(cfg);
        case Suite::kernel:
            return run_suite_kernel(cfg);
        case Suite::bounds:
            return run_suite_bounds(cfg);
        case Suite::all:
            append(run_suite_special(cfg));
            append(run_suite_moments(cfg));
            append(run_suite_cauchy(cfg));
            append(run_suite_theorems(cfg));
            append(run_suite_kernel(cfg));
            append(run_suite_bounds(cfg));
            detail::push_sorted(out);
            return out;
    }
    throw std::logic_error("run_suite: unknown suite");
}

inline bool all_pass(const std::vector<CheckReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

// ---------------------------------------------------------------------------
// single-point evaluation
// ---------------------------------------------------------------------------

struct EvalOutput {
    Complex value{0.0, 0.0};
    double certified_error = 0.0;
    long work = 0;  // series terms or quadrature nodes
    std::string unit;
};

inline EvalOutput eval_point(const RunConfig& cfg, const std::string& target, LogPolarPoint z) {
    cfg.validate();
    EvalOutput out;
    if (target == "theta") {
        const SeriesEvalResult r = theta_q(z, cfg.q, cfg.tol_series);
        out = {r.value, r.tail_bound, r.terms_used, "terms"};
    } else if (target == "exp_q") {
        const SeriesEvalResult r = exp_q_entire(z.to_complex(), cfg.q, cfg.tol_series);
        out = {r.value, r.tail_bound, r.terms_used, "terms"};
    } else if (target == "E_q") {
        const SeriesEvalResult r = e_q_entire(z.to_complex(), cfg.q, cfg.tol_series);
        out = {r.value, r.tail_bound, r.terms_used, "terms"};
    } else if (target == "e1") {
        KernelParams kp;
        kp.p = std::max(cfg.p, cfg.q);
        kp.q = std::min(cfg.p, cfg.q);
        kp.tol = cfg.tol_quad;
        out = {kernel_e1(z.to_complex(), kp), 0.0, 1, "terms"};
    } else if (target == "e2") {
        out = {kernel_e2(z.to_complex(), cfg.q, cfg.tol_series), 0.0, 1, "terms"};
    } else if (target == "e_tilde") {
        KernelParams kp;
        kp.p = std::max(cfg.p, cfg.q);
        kp.q = std::min(cfg.p, cfg.q);
        kp.margin = cfg.margin;
        kp.tol = cfg.tol_quad;
        const QuadResult r = convolution_kernel(z, kp);
        out = {r.value, r.abs_error_estimate, r.nodes_used, "nodes"};
    } else {
        throw std::invalid_argument("eval_point: unknown target " + target);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON serialization (runtime_ms deliberately excluded: reports must be
// byte-identical across reruns)
// ---------------------------------------------------------------------------

using Json = nlohmann::ordered_json;

inline Json check_value_to_json(const CheckValue& v) {
    if (!v.is_complex) return Json(v.v.real());
    Json j;
    j["re"] = v.v.real();
    j["im"] = v.v.imag();
    return j;
}

inline Json config_to_json(const RunConfig& cfg) {
    Json j;
    j["q"] = cfg.q;
    j["p"] = cfg.p;
    j["tol_series"] = cfg.tol_series;
    j["tol_quad"] = cfg.tol_quad;
    j["eps_contour"] = cfg.eps_contour;
    j["margin"] = cfg.margin;
    j["alpha_policy"] = cfg.alpha_policy;
    j["k_max"] = cfg.k_max;
    j["seed"] = cfg.seed;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    RunConfig cfg;
    if (j.contains("q")) cfg.q = j.at("q").get<double>();
    if (j.contains("p")) cfg.p = j.at("p").get<double>();
    if (j.contains("tol_series")) cfg.tol_series = j.at("tol_series").get<double>();
    if (j.contains("tol_quad")) cfg.tol_quad = j.at("tol_quad").get<double>();
    if (j.contains("eps_contour")) cfg.eps_contour = j.at("eps_contour").get<double>();
    if (j.contains("margin")) cfg.margin = j.at("margin").get<double>();
    if (j.contains("alpha_policy")) {
        const auto& a = j.at("alpha_policy");
        cfg.alpha_policy = a.is_string() ? a.get<std::string>() : detail::fmt_double(a.get<double>());
    }
    if (j.contains("k_max")) cfg.k_max = j.at("k_max").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<long>();
    return cfg;
}

inline Json report_to_json(const RunConfig& cfg, const std::vector<CheckReport>& reports) {
    Json j;
    j["config"] = config_to_json(cfg);
    Json arr = Json::array();
    for (const auto& r : reports) {
        Json c;
        c["check_id"] = r.check_id;
        c["params"] = Json(r.params);
        c["expected"] = check_value_to_json(r.expected);
        c["computed"] = check_value_to_json(r.computed);
        c["abs_err"] = r.abs_err;
        c["rel_err"] = r.rel_err;
        c["error_estimate"] = r.error_estimate;
        c["tolerance"] = r.tolerance;
        c["pass"] = r.pass;
        arr.push_back(std::move(c));
    }
    j["checks"] = std::move(arr);
    return j;
}

inline std::string render_table(const std::vector<CheckReport>& reports, bool with_runtime = true) {
    std::ostringstream os;
    os << std::left << std::setw(44) << "check" << std::right << std::setw(13) << "rel_err"
       << std::setw(13) << "estimate" << std::setw(11) << "tol";
    if (with_runtime) os << std::setw(9) << "ms";
    os << "  result\n";
    int passed = 0;
    for (const auto& r : reports) {
        os << std::left << std::setw(44) << r.check_id << std::right << std::scientific
           << std::setprecision(3) << std::setw(13) << r.rel_err << std::setw(13)
           << r.error_estimate << std::setw(11) << std::setprecision(1) << r.tolerance;
        if (with_runtime) os << std::setw(9) << r.runtime_ms;
        os << (r.pass ? "  pass" : "  FAIL") << "\n";
        if (r.pass) ++passed;
    }
    os << passed << "/" << reports.size() << " checks passed\n";
    return os.str();
}

}  // namespace qcalc
