#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcalc/repr.hpp"

using namespace qcalc;

namespace {

const FunctionSpec& member(const std::vector<FunctionSpec>& cs, const std::string& name) {
    for (const auto& f : cs)
        if (f.name == name) return f;
    throw std::runtime_error("no corpus member " + name);
}

ReprParams make_params(double q, int k, double tol = 1e-8) {
    ReprParams p;
    p.q = q;
    p.k = k;
    p.eps = 0.5;
    p.alpha = estimated_alpha(q);
    p.margin = 0.3;
    p.tol = tol;
    return p;
}

}  // namespace

TEST_CASE("moment integrals reproduce q^{n(n-1)/2}") {
    for (double q : {1.5, 2.0}) {
        for (int n : {0, 1, 3, 6}) {
            const QuadResult r = moment_integral_m1(n, q, 0.0, 1e-9);
            const double want = std::pow(q, 0.5 * n * (n - 1.0));
            INFO("q=" << q << " n=" << n);
            CHECK(std::abs(r.value - want) <= 1e-8 * want);
            CHECK(std::abs(r.value.imag()) <= 1e-8 * want);
        }
    }
}

TEST_CASE("moment integrals reproduce [n]_q!") {
    for (double q : {1.5, 2.0}) {
        for (int n : {0, 2, 3, 7}) {
            const QuadResult r = moment_integral_m2(n, q, 0.0, 1e-9);
            const double want = q_factorial(n, q);
            INFO("q=" << q << " n=" << n);
            CHECK(std::abs(r.value - want) <= 1e-8 * want);
        }
    }
    // the worked example [3]_{1.5}! = 11.875 along a tilted ray
    const QuadResult r = moment_integral_m2(3, 1.5, 0.2, 1e-9);
    CHECK(std::abs(r.value - 11.875) <= 1e-8 * 11.875);
}

TEST_CASE("moment integrals are direction independent") {
    for (int n : {0, 4}) {
        const QuadResult a = moment_integral_m1(n, 2.0, -0.4, 1e-9);
        const QuadResult b = moment_integral_m1(n, 2.0, 0.0, 1e-9);
        const QuadResult c = moment_integral_m1(n, 2.0, 0.4, 1e-9);
        const double est = a.abs_error_estimate + b.abs_error_estimate + c.abs_error_estimate;
        CHECK(std::abs(a.value - b.value) <= 3.0 * est);
        CHECK(std::abs(c.value - b.value) <= 3.0 * est);
    }
}

TEST_CASE("inadmissible ray directions are rejected") {
    CHECK_THROWS_AS(moment_integral_m1(1, 2.0, M_PI - 1e-4, 1e-8), std::domain_error);
    CHECK_THROWS_AS(moment_integral_m2(1, 2.0, -M_PI + 1e-4, 1e-8), std::domain_error);
}

TEST_CASE("Cauchy kernel via Theta matches z/(omega - z)") {
    const double q = 2.0;
    const double alpha = estimated_alpha(q);
    {
        const Complex omega(2.0, 0.0), z(1.0, 0.0);
        const QuadResult r = cauchy_kernel_theta(omega, z, q, 0.0, alpha, 1e-9);
        CHECK(std::abs(r.value - 1.0) < 1e-7);
    }
    {
        const Complex omega(0.0, 2.0), z(0.5, 0.0);
        const double d = -std::arg(omega / z);
        const QuadResult r = cauchy_kernel_theta(omega, z, 1.5, d, estimated_alpha(1.5), 1e-9);
        const Complex want = z / (omega - z);
        CHECK(std::abs(r.value - want) < 1e-7 * std::abs(want));
    }
    CHECK_THROWS_AS(cauchy_kernel_theta(Complex(1, 0), Complex(1, 0), q, 0.0, alpha, 1e-8),
                    std::domain_error);
    // ratio below the admissibility threshold
    CHECK_THROWS_AS(cauchy_kernel_theta(Complex(1.0, 0), Complex(0.99, 0), q, 0.0, alpha, 1e-8),
                    std::domain_error);
}

TEST_CASE("Cauchy kernel via exp_q matches z/(omega - z)") {
    {
        const QuadResult r = cauchy_kernel_expq(Complex(3, 0), Complex(1, 0), 2.0, 0.0, 1e-9);
        CHECK(std::abs(r.value - 0.5) < 1e-7);
    }
    {
        const Complex omega = std::polar(1.2, 0.5), z = std::polar(0.6, 0.5);
        const QuadResult r = cauchy_kernel_expq(omega, z, 2.0, 0.0, 1e-9);
        CHECK(std::abs(r.value - 1.0) < 1e-7);
    }
    {   // ratio barely admissible: slow decay, larger budget, looser target
        const Complex omega(1.2, 0.0), z(1.0, 0.0);
        const QuadResult r = cauchy_kernel_expq(omega, z, 2.0, 0.0, 1e-7);
        const Complex want = z / (omega - z);
        CHECK(std::abs(r.value - want) < 1e-5 * std::abs(want));
    }
    CHECK_THROWS_AS(cauchy_kernel_expq(Complex(1.05, 0), Complex(1, 0), 2.0, 0.0, 1e-8),
                    std::domain_error);
}

TEST_CASE("Theorem-1 representation against the tilde oracle") {
    const auto cs = corpus(2.0);
    const auto& sq = member(cs, "z^2");
    const auto& geo = member(cs, "1/(1-z)");
    {
        const QuadResult r = qderiv_repr_m1(sq, Complex(0.1, 0.0), make_params(2.0, 1));
        CHECK(std::abs(r.value - 0.2) < 1e-6);
    }
    {
        const QuadResult r = qderiv_repr_m1(geo, Complex(0.1, 0.0), make_params(2.0, 1));
        CHECK(std::abs(r.value - 1.25) < 1e-6);
    }
    {  // k = 0 reduces to the Cauchy formula
        const Complex z(0.05, 0.03);
        const QuadResult r = qderiv_repr_m1(geo, z, make_params(2.0, 0));
        const Complex want = geo.closed_form(z);
        CHECK(std::abs(r.value - want) < 1e-7);
    }
    {  // z = 0 picks out the scaled Taylor coefficient
        const QuadResult r = qderiv_repr_m1(geo, Complex(0.0, 0.0), make_params(2.0, 2));
        const Complex want = tilde_dq(geo, Complex(0.0, 0.0), 2.0, 2);
        CHECK(std::abs(r.value - want) < 1e-6 * std::abs(want));
    }
    CHECK_THROWS_AS(qderiv_repr_m1(geo, Complex(0.4, 0.0), make_params(2.0, 1)),
                    std::domain_error);
}

TEST_CASE("Theorem-2 representation against the Jackson oracle") {
    const auto cs = corpus(2.0);
    const auto& geo = member(cs, "1/(1-z)");
    const auto& cube = member(cs, "z^3");
    {
        const QuadResult r = qderiv_repr_m2(geo, Complex(0.1, 0.0), make_params(2.0, 1));
        CHECK(std::abs(r.value - 1.0 / 0.72) < 1e-6);
    }
    {
        const QuadResult r = qderiv_repr_m2(cube, Complex(0.05, 0.0), make_params(2.0, 2));
        CHECK(std::abs(r.value - 1.05) < 1e-5);
    }
    {  // constant function: first derivative vanishes
        const auto& cst = member(cs, "z^0");
        const QuadResult r = qderiv_repr_m2(cst, Complex(0.08, 0.0), make_params(2.0, 1));
        CHECK(std::abs(r.value) < 1e-7);
    }
}

TEST_CASE("Corollary branches") {
    const auto cs = corpus(2.0);
    const auto& cube = member(cs, "z^3");
    const auto& geo = member(cs, "1/(1-z)");
    {  // generic 0 < p < q against the pointwise oracle
        const Complex z(0.05, 0.0);
        const QuadResult r = pq_deriv_repr(cube, z, 2.0, 3.0, 1, make_params(3.0, 1));
        CHECK(std::abs(r.value - 0.0475) < 1e-7);
    }
    {  // p = 0 dispatches to the Theta form
        const QuadResult a = pq_deriv_repr(member(cs, "z^2"), Complex(0.1, 0.0), 0.0, 2.0, 1,
                                           make_params(2.0, 1));
        CHECK(std::abs(a.value - 0.2) < 1e-6);
    }
    {  // p = 1 agrees with the Theorem-2 path
        const Complex z(0.1, 0.0);
        const QuadResult a = pq_deriv_repr(geo, z, 1.0, 2.0, 1, make_params(2.0, 1));
        const QuadResult b = qderiv_repr_m2(geo, z, make_params(2.0, 1));
        CHECK(std::abs(a.value - b.value) <= 1e-7 * std::max(1.0, std::abs(b.value)));
    }
    CHECK_THROWS_AS(pq_deriv_repr(cube, Complex(0.05, 0), 3.0, 2.0, 1, make_params(2.0, 1)),
                    std::domain_error);
}

TEST_CASE("representations are stable across the alpha safety range") {
    // alpha only gates admissibility and the truncation envelope; values
    // must agree for any exponent between the estimate and estimate + 0.5
    const auto cs = corpus(2.0);
    const auto& geo = member(cs, "1/(1-z)");
    ReprParams lo = make_params(2.0, 1);
    ReprParams hi = lo;
    hi.alpha = lo.alpha + 0.5;
    // admissible under the tighter (larger-alpha) constraint
    const Complex z(0.3 * std::pow(2.0, -1) * 0.5 * std::pow(2.0, 0.5 - hi.alpha), 0.0);
    const QuadResult a = qderiv_repr_m1(geo, z, lo);
    const QuadResult b = qderiv_repr_m1(geo, z, hi);
    CHECK(std::abs(a.value - b.value) <=
          5.0 * (a.abs_error_estimate + b.abs_error_estimate) + 1e-10);
    const Complex want = tilde_dq(geo, z, 2.0, 1);
    CHECK(std::abs(a.value - want) <= 1e-6 * std::abs(want));
    CHECK(std::abs(b.value - want) <= 1e-6 * std::abs(want));
}

TEST_CASE("k=2 with complex z and eps-independence") {
    const auto cs = corpus(2.0);
    const auto& poly = member(cs, "poly3");
    const Complex z = std::polar(0.04, 1.1);
    ReprParams p = make_params(2.0, 2);
    const QuadResult a = qderiv_repr_m2(poly, z, p);
    const Complex want = jackson_dq(poly, z, 2.0, 2);
    CHECK(std::abs(a.value - want) <= 1e-5 * std::max(1.0, std::abs(want)));

    ReprParams wide = p;
    wide.eps = 1.0;  // needs radius > 1: poly3 is entire
    const QuadResult b = qderiv_repr_m2(poly, z, wide);
    CHECK(std::abs(a.value - b.value) <=
          5.0 * (a.abs_error_estimate + b.abs_error_estimate) + 1e-9);
}
