#pragma once

// Deterministic quadrature over rays from the origin and circles around it.
//
// Ray integrals are computed after the substitution r = e^u: every integrand
// in this library is majorized by c * exp(-beta log^2 r) * r^mu, which is a
// Gaussian (beta > 0) or a pure exponential (beta = 0, mu < -1) in u, so the
// truncation window [u_min, u_max] is solved from the envelope in closed
// form and a fixed-order panel rule converges quickly on the remainder.
// Node sets and reduction order depend only on the inputs, never on timing
// or scheduling, so results are bit-identical across runs.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qcalc/special.hpp"

namespace qcalc {

/// One branch of a decay envelope: log |g| <= log_c - beta log^2 r + mu log r.
struct EnvelopeBranch {
    double log_c = 0.0;
    double beta = 0.0;  // >= 0
    double mu = 0.0;

    double log_value(double v) const { return log_c + v * (mu - beta * v); }
};

/// Certified majorant of an integrand along a ray: `main` holds for
/// r >= r0 and `small` (when present) for r < r0; r0 = 0 means `main` is
/// global. beta > 0 gives Gaussian tails; beta = 0 needs mu < -1 for the
/// outer truncation and mu > -1 on the small side for integrability at 0.
struct DecayEnvelope {
    EnvelopeBranch main;
    double r0 = 0.0;
    std::optional<EnvelopeBranch> small;
    bool integrable_at_zero = true;

    static DecayEnvelope zero() {
        DecayEnvelope e;
        e.main.log_c = -std::numeric_limits<double>::infinity();
        return e;
    }

    bool is_zero() const { return main.log_c == -std::numeric_limits<double>::infinity(); }

    double log_value(double v) const {
        if (small && v < std::log(r0)) return small->log_value(v);
        return main.log_value(v);
    }
};

/// Integration ray [0,inf) e^{i theta}; the truncation window normally comes
/// from the envelope, but explicit overrides are honored.
struct RaySpec {
    double theta = 0.0;
    std::optional<double> u_min_override;
    std::optional<double> u_max_override;
};

struct QuadResult {
    Complex value{0.0, 0.0};
    double abs_error_estimate = 0.0;
    long nodes_used = 0;
};

namespace detail {

// Gauss-Legendre, order 15.
inline constexpr std::array<std::array<double, 2>, 15> kGL15{{
    {-0.9879925180204854, 0.030753241996118647},
    {-0.937273392400706, 0.07036604748810807},
    {-0.8482065834104272, 0.10715922046717177},
    {-0.7244177313601701, 0.1395706779261539},
    {-0.5709721726085388, 0.16626920581699378},
    {-0.3941513470775634, 0.18616100001556188},
    {-0.20119409399743451, 0.19843148532711125},
    {0.0, 0.2025782419255609},
    {0.20119409399743451, 0.19843148532711125},
    {0.3941513470775634, 0.18616100001556188},
    {0.5709721726085388, 0.16626920581699378},
    {0.7244177313601701, 0.1395706779261539},
    {0.8482065834104272, 0.10715922046717177},
    {0.937273392400706, 0.07036604748810807},
    {0.9879925180204854, 0.030753241996118647},
}};

// log of the right tail bound: int_U^inf exp(-b v^2 + a v + c) dv, valid
// when the exponent is decreasing at U (slope a - 2bU < 0).
inline double log_right_tail(const EnvelopeBranch& e, double a_shift, double U) {
    const double a = e.mu + a_shift;
    if (e.beta > 0.0) {
        const double slope = 2.0 * e.beta * U - a;
        if (slope <= 0.0) return std::numeric_limits<double>::infinity();
        return e.log_c - e.beta * U * U + a * U - std::log(std::max(slope, 1e-300));
    }
    if (a >= 0.0) return std::numeric_limits<double>::infinity();
    return e.log_c + a * U - std::log(-a);
}

// log of the left tail bound: int_-inf^V exp(-b v^2 + a v + c) dv.
inline double log_left_tail(const EnvelopeBranch& e, double a_shift, double V) {
    const double a = e.mu + a_shift;
    if (e.beta > 0.0) {
        const double slope = a - 2.0 * e.beta * V;
        if (slope <= 0.0) return std::numeric_limits<double>::infinity();
        return e.log_c - e.beta * V * V + a * V - std::log(std::max(slope, 1e-300));
    }
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    return e.log_c + a * V - std::log(a);
}

// exponent peak of exp(env(v) + v) on the main branch
inline double main_peak(const EnvelopeBranch& e) {
    if (e.beta > 0.0) return (e.mu + 1.0) / (2.0 * e.beta);
    return 0.0;
}

}  // namespace detail

/// Truncation window [u_min, u_max] such that the envelope certifies a
/// total dropped-tail contribution below `tail_budget` (each side gets half).
inline std::pair<double, double> truncation_window(const DecayEnvelope& env, double tail_budget) {
    if (!(tail_budget > 0.0)) throw std::invalid_argument("truncation_window: budget > 0 required");
    const double target = std::log(0.5 * tail_budget);
    const EnvelopeBranch& m = env.main;
    if (m.beta == 0.0 && m.mu + 1.0 >= 0.0)
        throw std::invalid_argument("truncation_window: envelope with beta = 0 needs mu < -1");

    double u_max = detail::main_peak(m) + 1.0;
    for (int i = 0; i < 4000 && detail::log_right_tail(m, 1.0, u_max) > target; ++i) u_max += 0.5;
    if (detail::log_right_tail(m, 1.0, u_max) > target)
        throw std::runtime_error("truncation_window: right tail does not close");

    const EnvelopeBranch left = env.small ? *env.small : env.main;
    if (left.beta == 0.0 && left.mu + 1.0 <= 0.0)
        throw std::invalid_argument("truncation_window: envelope not integrable at 0");
    double u_min = env.small ? std::log(env.r0) : detail::main_peak(left) - 1.0;
    for (int i = 0; i < 4000 && detail::log_left_tail(left, 1.0, u_min) > target; ++i) u_min -= 0.5;
    if (detail::log_left_tail(left, 1.0, u_min) > target)
        throw std::runtime_error("truncation_window: left tail does not close");
    if (!(u_min < u_max)) u_min = u_max - 1.0;
    return {u_min, u_max};
}

/// Upper bound on int |g| dr implied by the envelope over [u_min, u_max]
/// (coarse grid on the log axis; used only as a magnitude scale).
inline double envelope_scale(const DecayEnvelope& env, double u_min, double u_max) {
    if (env.is_zero()) return 0.0;
    const int n = 256;
    const double h = (u_max - u_min) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double v = u_min + i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        s += w * std::exp(env.log_value(v) + v);
    }
    return s * h;
}

namespace detail {

struct RayState {
    std::function<Complex(Complex)> const* g;
    Complex ray_dir;
    long nodes = 0;
    long node_budget = 0;
    CompensatedC acc;
    double err = 0.0;
    double span = 1.0;
    double tol_disc = 0.0;

    Complex panel(double a, double b) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        Complex s(0.0, 0.0);
        for (const auto& nw : kGL15) {
            const double u = mid + half * nw[0];
            const Complex t = std::exp(u) * ray_dir;
            s += nw[1] * (*g)(t)*t;
        }
        nodes += 15;
        if (nodes > node_budget)
            throw std::runtime_error("integrate_ray: no convergence within node budget");
        return s * half;
    }

    void refine(double a, double b, Complex whole, int depth) {
        const double mid = 0.5 * (a + b);
        const Complex l = panel(a, mid);
        const Complex r = panel(mid, b);
        const double diff = std::abs(whole - (l + r));
        if (diff <= tol_disc * (b - a) / span || depth >= 26) {
            acc.add(l);
            acc.add(r);
            err += diff;
            return;
        }
        refine(a, mid, l, depth + 1);
        refine(mid, b, r, depth + 1);
    }
};

}  // namespace detail

/// Adaptive panel integration of g along the ray, with truncation certified
/// by the envelope. `tol` is an absolute target: half goes to truncation,
/// half to the panel refinement budget. The envelope is checked against
/// |g| at ten deterministic radii before any work is accepted.
inline QuadResult integrate_ray(const std::function<Complex(Complex)>& g, const RaySpec& spec,
                                const DecayEnvelope& env, double tol,
                                long node_budget = 2000000) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_ray: tol > 0 required");
    if (env.is_zero()) return {Complex(0.0, 0.0), 0.0, 0};

    auto [u_min, u_max] = truncation_window(env, 0.5 * tol);
    if (spec.u_min_override) u_min = *spec.u_min_override;
    if (spec.u_max_override) u_max = *spec.u_max_override;

    const Complex dir = std::polar(1.0, spec.theta);
    // envelope validation at ten quasi-uniform radii
    for (int i = 0; i < 10; ++i) {
        const double v = u_min + (u_max - u_min) * std::fmod(0.5 + 0.618033988749895 * i, 1.0);
        const Complex t = std::exp(v) * dir;
        const double bound = std::exp(env.log_value(v));
        if (std::abs(g(t)) > bound * (1.0 + 1e-6) + 1e-300)
            throw std::runtime_error("integrate_ray: envelope violated at sampled node r=" +
                                     std::to_string(std::exp(v)));
    }

    detail::RayState st;
    st.g = &g;
    st.ray_dir = dir;
    st.node_budget = node_budget;
    st.span = u_max - u_min;
    st.tol_disc = 0.5 * tol;

    const int k0 = std::max(1, static_cast<int>(std::ceil((u_max - u_min) / 2.0)));
    const double h0 = (u_max - u_min) / k0;
    for (int i = 0; i < k0; ++i) {
        const double a = u_min + i * h0, b = u_min + (i + 1) * h0;
        st.refine(a, b, st.panel(a, b), 0);
    }
    return {st.acc.value(), st.err + 0.5 * tol, st.nodes};
}

/// Relative-target front end: a coarse pass pins the magnitude, the second
/// pass runs at rel_tol times that scale. The envelope-implied L1 bound
/// seeds the first pass so the scale is certified from above.
inline QuadResult integrate_ray_rel(const std::function<Complex(Complex)>& g, const RaySpec& spec,
                                    const DecayEnvelope& env, double rel_tol,
                                    long node_budget = 2000000) {
    if (env.is_zero()) return {Complex(0.0, 0.0), 0.0, 0};
    const auto [u_min, u_max] = truncation_window(env, 1e-16);
    const double scale0 = envelope_scale(env, u_min, u_max);
    if (!(scale0 > 0.0)) return {Complex(0.0, 0.0), 0.0, 0};
    const QuadResult coarse =
        integrate_ray(g, spec, env, std::max(rel_tol, 1e-3) * scale0, node_budget);
    const double scale = std::max(std::abs(coarse.value), 1e-10 * scale0);
    QuadResult out = integrate_ray(g, spec, env, rel_tol * scale, node_budget);
    out.nodes_used += coarse.nodes_used;
    return out;
}

/// Equally-spaced trapezoid rule on |omega| = eps with node doubling until
/// two successive levels agree within tol * max(1, |I|); spectrally accurate
/// for integrands analytic in an annulus around the contour. `normalized`
/// divides by 2 pi i (the Cauchy normalization).
inline QuadResult integrate_circle(const std::function<Complex(Complex)>& h, double eps, double tol,
                                   bool normalized = true, int n_start = 8, int n_cap = 8192) {
    if (!(eps > 0.0)) throw std::invalid_argument("integrate_circle: eps > 0 required");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_circle: tol > 0 required");
    std::vector<Complex> vals;  // h(w_j) * w_j at angles 2 pi j / N
    long nodes = 0;
    Complex prev(0.0, 0.0);
    bool have_prev = false;
    for (int n = n_start; n <= n_cap; n *= 2) {
        std::vector<Complex> next(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            if (have_prev && j % 2 == 0) {
                next[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(j / 2)];
                continue;
            }
            const Complex w = std::polar(eps, 2.0 * M_PI * j / n);
            next[static_cast<std::size_t>(j)] = h(w) * w;
            ++nodes;
        }
        vals = std::move(next);
        detail::CompensatedC acc;
        for (const Complex& v : vals) acc.add(v);
        const Complex cur = acc.value() / static_cast<double>(n);
        if (have_prev) {
            const double diff = std::abs(cur - prev);
            if (diff <= tol * std::max(1.0, std::abs(cur))) {
                const Complex value = normalized ? cur : cur * Complex(0.0, 2.0 * M_PI);
                return {value, normalized ? diff : 2.0 * M_PI * diff, nodes};
            }
        }
        prev = cur;
        have_prev = true;
    }
    throw std::runtime_error("integrate_circle: no convergence by node cap");
}

/// Closed exclusion arc of ray directions.
struct ForbiddenArc {
    double center = 0.0;
    double half_width = 0.0;
};

namespace detail {

inline double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace detail

/// Deterministic choice of a ray direction theta with arg(omega) + theta at
/// least `margin` away from +-pi and clear of the supplied exclusion arcs;
/// the admissible theta closest to -arg(omega) wins (ties go to the
/// counterclockwise side).
inline double admissible_direction(double omega_arg, const std::vector<ForbiddenArc>& forbidden,
                                   double margin) {
    if (!(margin > 0.0) || !(margin < M_PI))
        throw std::invalid_argument("admissible_direction: margin in (0, pi) required");
    auto admissible = [&](double theta) {
        if (M_PI - detail::angular_distance(omega_arg + theta, 0.0) < margin) return false;
        for (const ForbiddenArc& arc : forbidden)
            if (detail::angular_distance(theta, arc.center) <= arc.half_width) return false;
        return true;
    };
    const double base = detail::wrap_angle(-omega_arg);
    const double step = 0.01;
    const int max_steps = static_cast<int>(std::ceil(M_PI / step));
    for (int i = 0; i <= max_steps; ++i) {
        for (int sgn : {+1, -1}) {
            if (i == 0 && sgn < 0) continue;
            const double theta = detail::wrap_angle(base + sgn * i * step);
            if (admissible(theta)) return theta;
        }
    }
    throw std::runtime_error("admissible_direction: no admissible direction");
}

/// One inner ray problem produced per outer contour node.
struct NestedInner {
    std::function<Complex(Complex)> g;
    RaySpec spec;
    DecayEnvelope env;
    Complex prefactor{1.0, 0.0};  // multiplies the ray result (e.g. f(omega))
};

/// Nested (circle x ray) integral: (1/2 pi i) oint InnerFactory(w) dw where
/// each evaluand is prefactor * integrate_ray(g). Inner tolerances follow
/// the outer node count with a safety factor of 4 and are re-tightened on
/// every outer refinement; the error estimate combines both levels.
inline QuadResult integrate_nested(double eps,
                                   const std::function<NestedInner(Complex)>& inner_factory,
                                   double tol, int n_start = 8, int n_cap = 1024) {
    if (!(eps > 0.0)) throw std::invalid_argument("integrate_nested: eps > 0 required");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_nested: tol > 0 required");
    long nodes = 0;
    Complex prev(0.0, 0.0);
    double prev_inner_err = 0.0;
    bool have_prev = false;
    for (int n = n_start; n <= n_cap; n *= 2) {
        detail::CompensatedC acc;
        double inner_err = 0.0;
        for (int j = 0; j < n; ++j) {
            const Complex w = std::polar(eps, 2.0 * M_PI * j / n);
            const NestedInner inner = inner_factory(w);
            const double pref = std::abs(inner.prefactor);
            if (pref == 0.0 || inner.env.is_zero()) continue;
            const double inner_tol = tol / (4.0 * n * eps * pref);
            const QuadResult r = integrate_ray(inner.g, inner.spec, inner.env, inner_tol);
            nodes += r.nodes_used + 1;
            acc.add(inner.prefactor * r.value * w);
            inner_err += pref * r.abs_error_estimate * eps / n;
        }
        const Complex cur = acc.value() / static_cast<double>(n);
        if (have_prev) {
            const double diff = std::abs(cur - prev);
            if (diff <= tol * std::max(1.0, std::abs(cur)))
                return {cur, diff + inner_err + prev_inner_err, nodes};
        }
        prev = cur;
        prev_inner_err = inner_err;
        have_prev = true;
    }
    throw std::runtime_error("integrate_nested: no convergence by outer node cap");
}

}  // namespace qcalc
