#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcalc/qcore.hpp"

using namespace qcalc;

TEST_CASE("q_number basics") {
    CHECK(q_number(0, 2.0) == 0.0);
    CHECK(q_number(1, 7.5) == 1.0);
    CHECK(q_number(3, 2.0) == Catch::Approx(7.0).epsilon(1e-15));  // 1 + 2 + 4
    CHECK_THROWS_AS(q_number(3, 1.0), std::domain_error);
    CHECK_THROWS_AS(q_number(-1, 2.0), std::invalid_argument);
}

TEST_CASE("q_factorial values and modes") {
    CHECK(q_factorial(0, 3.0) == 1.0);
    CHECK(q_factorial(3, 2.0) == Catch::Approx(21.0).epsilon(1e-14));  // 1*3*7
    CHECK(q_factorial(2, 1.5) == Catch::Approx(2.5).epsilon(1e-14));
    CHECK(q_factorial(3, 2.0, FactorialMode::log) == Catch::Approx(std::log(21.0)).epsilon(1e-14));
    // near n ~ 300 only the log mode survives
    CHECK_THROWS_AS(q_factorial(300, 2.0), std::overflow_error);
    CHECK(std::isfinite(q_factorial(300, 2.0, FactorialMode::log)));
}

TEST_CASE("pq_number identities") {
    CHECK(pq_number(2, 3.0, 2.0) == Catch::Approx(5.0));
    CHECK(pq_number(1, 3.0, 2.0) == 1.0);
    CHECK(pq_number(0, 3.0, 2.0) == 0.0);
    CHECK_THROWS_AS(pq_number(2, 2.0, 2.0), std::domain_error);
    // symmetric under swapping p and q
    for (int n = 0; n <= 12; ++n)
        CHECK(pq_number(n, 3.0, 2.0) == Catch::Approx(pq_number(n, 2.0, 3.0)).margin(1e-12));
    // p = 0 degenerates to a pure power
    CHECK(pq_number(4, 0.0, 2.0) == Catch::Approx(8.0));
}

TEST_CASE("pq_factorial values and factorization") {
    CHECK(pq_factorial(3, 3.0, 2.0) == Catch::Approx(95.0).epsilon(1e-13));  // 1*5*19
    CHECK(pq_factorial(0, 3.0, 2.0) == 1.0);
    // [2]_{3,2}! = 5 and equals [2]_{3/2}! * 2^{2*1/2}
    CHECK(pq_factorial(2, 3.0, 2.0) == Catch::Approx(q_factorial(2, 1.5) * 2.0).epsilon(1e-13));
}

TEST_CASE("factorization [n]_pq! = [n]_{p/q}! q^{n(n-1)/2} in log domain") {
    for (double q : {1.5, 2.0, 3.0}) {
        const double p = 2.0 * q + 0.5;
        for (int n = 0; n <= 200; ++n) {
            const double lhs = log_pq_factorial(n, p, q);
            const double rhs = log_q_factorial(n, p / q) + 0.5 * n * (n - 1.0) * std::log(q);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12 * std::max(1.0, std::abs(rhs))));
        }
    }
}

TEST_CASE("confluence of q-numbers as q -> 1") {
    for (int n : {1, 5, 20}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            const double err = std::abs(q_number(n, 1.0 + h) - n);
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
        CHECK(prev < 1e-4 * n * n);
    }
}

TEST_CASE("moment sequences") {
    CHECK(MomentSequence::m1(2.0).at(3) == Catch::Approx(8.0));
    CHECK(MomentSequence::m2(2.0).at(3) == Catch::Approx(21.0));
    CHECK(MomentSequence::m_pq(3.0, 2.0).at(2) == Catch::Approx(5.0));
    CHECK(MomentSequence::factorial().at(5) == Catch::Approx(120.0));
    for (auto& m : {MomentSequence::m1(2.0), MomentSequence::m2(2.0),
                    MomentSequence::m_pq(3.0, 2.0), MomentSequence::factorial()})
        CHECK(m.at(0) == 1.0);
    CHECK_THROWS_AS(MomentSequence::m1(0.5), std::invalid_argument);
    CHECK_THROWS_AS(moment_sequence(MomentKind::m_pq, QParams::single(2.0)), std::invalid_argument);
}

TEST_CASE("log-convexity checks") {
    CHECK(check_log_convex(MomentSequence::m1(2.0), 200));
    CHECK(check_log_convex(MomentSequence::m2(1.5), 200));
    CHECK(check_log_convex(MomentSequence::m_pq(3.0, 2.0), 200));
    const auto bad = MomentSequence::custom(
        [](int n) { return n == 0 ? 0.0 : std::log(10.0); }, "plateau");
    CHECK_FALSE(check_log_convex(bad, 3));  // 100 > 1 * 10 at n = 1
}

TEST_CASE("q^{n(n-1)/2} <= [n]_q! up to n = 200") {
    for (double q : {1.5, 2.0, 3.0})
        for (int n = 0; n <= 200; ++n)
            CHECK(MomentSequence::m1(q).log_at(n) <= MomentSequence::m2(q).log_at(n) + 1e-12);
}

TEST_CASE("omega_weight against brute force") {
    const auto m1 = MomentSequence::m1(2.0);
    CHECK(omega_weight(m1, 1.0) == 0.0);
    CHECK(omega_weight(m1, 0.0) == 0.0);
    CHECK(omega_weight(m1, 2.0) == Catch::Approx(std::log(2.0)).margin(1e-14));

    // brute-force sup over n <= 10 * (detected maximizer)
    for (double t : {0.3, 1.7, 4.0, 25.0, 300.0}) {
        for (auto& m : {MomentSequence::m1(2.0), MomentSequence::m2(1.5),
                        MomentSequence::m_pq(3.0, 2.0)}) {
            const double fast = omega_weight(m, t);
            double brute = 0.0;
            for (int n = 0; n <= 400; ++n)
                brute = std::max(brute, n * std::log(t) - m.log_at(n));
            CHECK(fast == Catch::Approx(brute).margin(1e-12));
        }
    }
    CHECK_THROWS_AS(omega_weight(MomentSequence::m1(2.0), 1e9, 5), std::runtime_error);
}

TEST_CASE("weight submultiplicativity on the grid") {
    const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
    const auto r1 = check_weight_submultiplicativity(MomentSequence::m1(2.0),
                                                     MomentSequence::m2(2.0), grid, grid);
    CHECK(r1.pass);
    // the m_pq split: m_pq = m_{p/q} * m1
    const auto r2 = check_weight_submultiplicativity(MomentSequence::m2(1.5),
                                                     MomentSequence::m1(2.0), grid, grid);
    CHECK(r2.pass);
    const auto prod = product_sequence(MomentSequence::m2(1.5), MomentSequence::m1(2.0));
    for (int n = 0; n <= 60; ++n)
        CHECK(prod.log_at(n) ==
              Catch::Approx(MomentSequence::m_pq(3.0, 2.0).log_at(n)).margin(1e-10));
}

TEST_CASE("weight function wrapper caches and matches") {
    WeightFunction w(MomentSequence::m1(2.0));
    CHECK(w(0.0) == 0.0);
    CHECK(w(2.0) == Catch::Approx(std::log(2.0)).margin(1e-14));
    CHECK(w(2.0) == w(2.0));
    // nondecreasing on a sample grid
    double prev = 0.0;
    for (double t = 0.25; t <= 64.0; t *= 2.0) {
        const double cur = w(t);
        CHECK(cur >= prev - 1e-14);
        prev = cur;
    }
}

TEST_CASE("QParams validation") {
    CHECK_THROWS_AS(QParams::single(1.0), std::invalid_argument);
    CHECK_THROWS_AS(QParams::pair(2.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(QParams::pair(-1.0, 2.0), std::invalid_argument);
    CHECK_NOTHROW(QParams::pair(0.0, 2.0));
    CHECK_THROWS_AS(QParams::pair(2.0, 3.0).require_kernel_order(), std::invalid_argument);
    CHECK_NOTHROW(QParams::pair(3.0, 2.0).require_kernel_order());
}
