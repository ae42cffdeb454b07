#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qcalc/series.hpp"

using namespace qcalc;

namespace {

const FunctionSpec& member(const std::vector<FunctionSpec>& cs, const std::string& name) {
    for (const auto& f : cs)
        if (f.name == name) return f;
    throw std::runtime_error("no corpus member " + name);
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

TEST_CASE("moment_derivative coefficient rule") {
    // d_{m1} z^2 = q z at q = 2
    TruncatedPowerSeries f({Complex(0, 0), Complex(0, 0), Complex(1, 0)});
    const auto d = moment_derivative(f, MomentSequence::m1(2.0), 1);
    REQUIRE(d.order() == 1);
    CHECK(std::abs(d.coeff(0)) == 0.0);
    CHECK(d.coeff(1).real() == Catch::Approx(2.0));

    // k = 0 is the identity
    const auto same = moment_derivative(f, MomentSequence::m1(2.0), 0);
    for (int n = 0; n <= 2; ++n) CHECK(same.coeff(n) == f.coeff(n));

    // all-ones series under m2: b_n = [n+1]_2 = 2^{n+1} - 1
    TruncatedPowerSeries ones(std::vector<Complex>(8, Complex(1, 0)));
    const auto j = moment_derivative(ones, MomentSequence::m2(2.0), 1);
    for (int n = 0; n <= 6; ++n)
        CHECK(j.coeff(n).real() == Catch::Approx(std::pow(2.0, n + 1) - 1.0).epsilon(1e-13));

    CHECK_THROWS_AS(moment_derivative(f, MomentSequence::m1(2.0), 3), std::invalid_argument);
}

TEST_CASE("pointwise derivative closed forms") {
    const auto cs = corpus(2.0);
    const auto& mono3 = member(cs, "z^3");
    const auto& geo = member(cs, "1/(1-z)");
    const auto& mono2 = member(cs, "z^2");
    const auto& cst = member(cs, "z^0");

    CHECK(std::abs(jackson_dq(mono3, Complex(0.3, 0), 2.0, 1) - Complex(0.63, 0)) < 1e-14);
    CHECK(std::abs(jackson_dq(cst, Complex(0.4, 0.2), 2.0, 1)) < 1e-15);
    CHECK(std::abs(jackson_dq(geo, Complex(0.1, 0), 2.0, 1) - Complex(1.0 / 0.72, 0)) < 1e-13);

    CHECK(std::abs(tilde_dq(mono2, Complex(0.1, 0), 2.0, 1) - Complex(0.2, 0)) < 1e-14);
    CHECK(std::abs(tilde_dq(geo, Complex(0.1, 0), 2.0, 1) - Complex(1.25, 0)) < 1e-13);
    CHECK(std::abs(tilde_dq(geo, Complex(0.07, 0.02), 2.0, 0) -
                   geo.closed_form(Complex(0.07, 0.02))) == 0.0);

    CHECK(std::abs(pq_derivative(mono3, Complex(0.05, 0), 3.0, 2.0, 1) - Complex(0.0475, 0)) < 1e-14);
    // p = 0 reduces to the tilde derivative
    CHECK(std::abs(pq_derivative(mono2, Complex(0.1, 0), 0.0, 2.0, 1) -
                   tilde_dq(mono2, Complex(0.1, 0), 2.0, 1)) < 1e-15);
    CHECK_THROWS_AS(pq_derivative(mono2, Complex(0.1, 0), 2.0, 2.0, 1), std::domain_error);
}

TEST_CASE("p,q swap symmetry") {
    const auto cs = corpus(2.0);
    for (const char* name : {"z^4", "poly3", "1/(1-z/2)", "e^z"}) {
        const auto& f = member(cs, name);
        for (int k : {1, 2, 3}) {
            const Complex z(0.021, 0.013);
            const Complex a = pq_derivative(f, z, 3.0, 2.0, k);
            const Complex b = pq_derivative(f, z, 2.0, 3.0, k);
            CHECK(std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("monomial rule for iterated pq derivatives") {
    // D^k z^n = ([n]_pq!/[n-k]_pq!) z^{n-k}
    const auto cs = corpus(2.0);
    for (int n = 1; n <= 6; ++n) {
        const auto& f = member(cs, "z^" + std::to_string(n));
        for (int k = 1; k <= n; ++k) {
            const Complex z(0.05, 0.01);
            const Complex got = pq_derivative(f, z, 3.0, 2.0, k);
            const double fac =
                std::exp(log_pq_factorial(n, 3.0, 2.0) - log_pq_factorial(n - k, 3.0, 2.0));
            const Complex want = fac * std::pow(z, n - k);
            CHECK(std::abs(got - want) <= 1e-10 * std::max(1e-6, std::abs(want)));
        }
    }
}

TEST_CASE("series route matches pointwise route") {
    // moment_derivative with m2 against jackson_dq, and m1 against tilde_dq
    const auto cs = corpus(2.0);
    for (double q : {1.5, 2.0}) {
        for (const auto& f : cs) {
            const double rad = std::min(f.radius, 4.0);
            for (int k : {1, 2, 3}) {
                const TruncatedPowerSeries tps = f.series(40);
                const auto dm2 = moment_derivative(tps, MomentSequence::m2(q), k);
                const auto dm1 = moment_derivative(tps, MomentSequence::m1(q), k);
                for (int i = 0; i < 20; ++i) {
                    // nodes q^k z must stay inside the domain, and well inside
                    // the truncation-accuracy region of the series
                    const double rho = 0.04 * rad * (0.2 + frac(0.7548776662466927 * (i + 1)));
                    const Complex z = std::polar(rho, 2.0 * M_PI * frac(0.5698402909980532 * (i + 1)));
                    const Complex j = jackson_dq(f, z, q, k);
                    const Complex t = tilde_dq(f, z, q, k);
                    CHECK(std::abs(dm2.eval(z) - j) <= 1e-9 * std::max(1.0, std::abs(j)));
                    CHECK(std::abs(dm1.eval(z) - t) <= 1e-9 * std::max(1.0, std::abs(t)));
                }
            }
        }
    }
}

TEST_CASE("moment_derivative is linear") {
    const auto m = MomentSequence::m_pq(3.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> a(12), b(12);
        for (int n = 0; n < 12; ++n) {
            a[n] = Complex(frac(0.31 * (trial + 1) * (n + 1)), frac(0.17 * (trial + 2) * (n + 1)));
            b[n] = Complex(frac(0.53 * (trial + 1) * (n + 2)), frac(0.71 * (trial + 3) * (n + 1)));
        }
        const Complex s(1.25, -0.5);
        std::vector<Complex> combo(12);
        for (int n = 0; n < 12; ++n) combo[n] = a[n] + s * b[n];
        const auto da = moment_derivative(TruncatedPowerSeries(a), m, 2);
        const auto db = moment_derivative(TruncatedPowerSeries(b), m, 2);
        const auto dc = moment_derivative(TruncatedPowerSeries(combo), m, 2);
        for (int n = 0; n <= dc.order(); ++n) {
            const Complex want = da.coeff(n) + s * db.coeff(n);
            CHECK(std::abs(dc.coeff(n) - want) <= 1e-13 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("rescaling identity for 0 < p < q") {
    // D^k_{p,q} f(z) = p^{k(k-1)/2} D^k_{1,q/p} f evaluated at p^k z
    // (the factor follows from [j]_{p,q} = p^{j-1} [j]_{q/p})
    const auto cs = corpus(2.0);
    for (const char* name : {"z^5", "poly5", "1/(1-z)", "e^z"}) {
        const auto& f = member(cs, name);
        const double p = 1.5, q = 2.5;
        for (int k : {1, 2, 3}) {
            const Complex z(0.012, -0.007);
            const Complex lhs = pq_derivative(f, z, p, q, k);
            const Complex rhs =
                std::pow(p, 0.5 * k * (k - 1.0)) * jackson_dq(f, std::pow(p, k) * z, q / p, k);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("derivatives at the origin use the series") {
    const auto cs = corpus(2.0);
    const auto& poly = member(cs, "poly3");
    // first derivative at 0 picks out a_1 scaled by the first moment ratio
    const Complex a1 = poly.series(4).coeff(1);
    CHECK(std::abs(jackson_dq(poly, Complex(0, 0), 2.0, 1) - a1) < 1e-12);
    CHECK(std::abs(tilde_dq(poly, Complex(0, 0), 2.0, 1) - a1) < 1e-12);
    CHECK(std::abs(pq_derivative(poly, Complex(0, 0), 3.0, 2.0, 1) - a1) < 1e-12);
}

TEST_CASE("domain violations are rejected") {
    const auto cs = corpus(2.0);
    const auto& geo = member(cs, "1/(1-z)");
    // q^k z leaves the unit disk
    CHECK_THROWS_AS(jackson_dq(geo, Complex(0.6, 0), 2.0, 1), std::domain_error);
    CHECK_THROWS_AS(pq_derivative(geo, Complex(0.3, 0), 3.0, 2.0, 2), std::domain_error);
}

TEST_CASE("corpus members validate closed form against series") {
    for (double q : {1.5, 2.0}) {
        const auto cs = corpus(q);
        CHECK(cs.size() >= 12);
        for (const auto& f : cs) {
            INFO(f.name);
            CHECK(f.validate());
        }
    }
}

TEST_CASE("corpus contents") {
    const auto cs = corpus(2.0);
    const auto& geo = member(cs, "1/(1-z)");
    const auto g10 = geo.series(10);
    for (int n = 0; n <= 10; ++n) CHECK(g10.coeff(n) == Complex(1.0, 0.0));
    CHECK(geo.radius == 1.0);
    CHECK(g10.tail()->rho == 1.0);

    const auto& ez = member(cs, "e^z");
    const auto e6 = ez.series(6);
    for (int n = 0; n <= 6; ++n)
        CHECK(std::abs(e6.coeff(n).real() - 1.0 / std::tgamma(n + 1.0)) < 1e-15);

    const auto& half = member(cs, "1/(1-z/2)");
    CHECK(half.radius == 2.0);
    CHECK(half.series(8).tail()->rho == 0.5);

    // tail certificates hold on the materialized coefficients
    for (const auto& f : cs) {
        const auto tps = f.series(30);
        if (!tps.tail() || tps.tail()->C == 0.0) continue;
        for (int n = 0; n <= 30; ++n)
            CHECK(std::abs(tps.coeff(n)) <= tps.tail()->C * std::pow(tps.tail()->rho, n) * (1 + 1e-12));
    }
}

TEST_CASE("truncated series tail bound controls evaluation error") {
    const auto geo = detail::geometric_spec(1.0);
    const auto tps = geo.series(25);
    const Complex z(0.3, 0.2);
    const Complex exact = geo.closed_form(z);
    CHECK(std::abs(tps.eval(z) - exact) <= tps.tail_bound(z) * (1 + 1e-12));
}
