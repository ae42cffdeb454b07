#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcalc/bounds.hpp"

using namespace qcalc;

TEST_CASE("E_q growth exponent fit is stable across grids") {
    const FitResult a = estimate_alpha_Eq(2.0, 1.0, 1e6, 6, {}, 1);
    const FitResult b = estimate_alpha_Eq(2.0, 3.0, 3e6, 7, {}, 11);
    CHECK(a.pass);
    CHECK(b.pass);
    CHECK(std::abs(a.constants.at("alpha") - b.constants.at("alpha")) < 0.1);
    // bound holds at |z| = 1
    const double K = a.constants.at("K") * 1.05;
    CHECK(K * 1.0 >= std::abs(e_q_entire(Complex(1.0, 0.0), 2.0, 1e-13).value) * 0.999);
    CHECK(a.constants.at("violations") == 0.0);
}

TEST_CASE("E_q fit rejects too-narrow radius spans") {
    CHECK_THROWS_AS(estimate_alpha_Eq(2.0, 1.0, 100.0), std::invalid_argument);
}

TEST_CASE("Theta lower-bound certificate") {
    const CheckReport r = validate_theta_lower_bound(2.0, 0.1, 500);
    CHECK(r.pass);
    CHECK(r.computed.v.real() > 0.0);

    // Delta independent of delta within a factor of 2
    std::vector<double> deltas{0.05, 0.1, 0.2};
    std::vector<double> fits;
    for (double d : deltas)
        fits.push_back(validate_theta_lower_bound(2.0, d, 500).computed.v.real());
    for (double f : fits) {
        CHECK(f <= 2.0 * fits[1] + 1e-12);
        CHECK(f >= 0.5 * fits[1] - 1e-12);
    }
}

TEST_CASE("exp_q bound certificates") {
    for (double q : {1.5, 2.0, 3.0}) {
        const CheckReport r = validate_expq_bounds(q, 0.1, 500);
        INFO("q=" << q);
        CHECK(r.pass);
        // at z = 0, |exp_q| = 1 forces C0 <= 1
        CHECK(std::stod(r.params.at("C0")) <= 1.0 + 1e-12);
        CHECK(std::stod(r.params.at("C1")) > 0.0);
        CHECK(std::stod(r.params.at("K0")) > 0.0);
    }
}

TEST_CASE("c(q) limit certificate") {
    const FitResult r = estimate_cq_limit(2.0, 100);
    CHECK(r.pass);
    CHECK(r.constants.at("last_increment") < 1e-12);
    // independent oracle: c(q) = prod (1 - q^{-j}); frozen high-precision value
    CHECK(r.constants.at("c_q") == Catch::Approx(0.28878809508660242).epsilon(1e-12));
    double prod = 1.0;
    for (int j = 1; j <= 100; ++j) prod *= 1.0 - std::pow(2.0, -j);
    CHECK(r.constants.at("c_q") == Catch::Approx(prod).epsilon(1e-13));

    for (double q : {1.5, 2.0, 3.0}) CHECK(estimate_cq_limit(q, 120).constants.at("c_q") > 0.0);
    CHECK_THROWS_AS(estimate_cq_limit(2.0, 10), std::invalid_argument);
}

TEST_CASE("class membership: polynomials pass, super-weight growth fails") {
    const auto mpq = MomentSequence::m_pq(3.0, 2.0);
    for (int n : {0, 2, 4}) {
        const auto f = [n](LogPolarPoint z) {
            return std::pow(z.to_complex(), n);
        };
        const FitResult r = check_class_membership(f, 0.0, 0.5 * M_PI, mpq, 1.5, 300);
        INFO("monomial degree " << n);
        CHECK(r.pass);
        CHECK(std::isfinite(r.constants.at("c")));
    }
    {  // constant function: c = 1 is consistent since omega(0) = 0
        const auto one = [](LogPolarPoint) { return Complex(1.0, 0.0); };
        const FitResult r = check_class_membership(one, 0.0, 0.5 * M_PI, mpq, 2.0, 300);
        CHECK(r.pass);
        CHECK(r.constants.at("c") >= 1.0 - 1e-12);
        CHECK(r.constants.at("c") <= 1.0 + 1e-12);
    }
    {  // grows like exp(log^2|u| / log q): beats the m1 weight's r^{1/2} slack
        const double q = 2.0;
        const auto g = [q](LogPolarPoint z) {
            return Complex(std::exp(z.log_r * z.log_r / std::log(q)), 0.0);
        };
        const FitResult r =
            check_class_membership(g, 0.0, 0.5 * M_PI, MomentSequence::m1(q), 1.01, 300, 1e6);
        CHECK_FALSE(r.pass);
    }
}

TEST_CASE("fitted constants are reproducible across re-seeded samples") {
    const FitResult a = estimate_alpha_Eq(1.5, 1.0, 1e6, 6, {}, 5);
    const FitResult b = estimate_alpha_Eq(1.5, 1.0, 1e6, 6, {}, 17);
    CHECK(std::abs(a.constants.at("K") - b.constants.at("K")) <
          0.2 * std::abs(a.constants.at("K")));
    CHECK(std::abs(a.constants.at("alpha") - b.constants.at("alpha")) < 0.2);
}
