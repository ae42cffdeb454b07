// Acceptance harness: runs every verification criterion at its stated
// tolerance and runtime budget and prints one pass/fail line per criterion.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "qcalc/qcalc.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    int failures = 0;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int passed_of(const std::vector<qcalc::CheckReport>& reports, const std::string& prefix,
              int* total) {
    int pass = 0;
    *total = 0;
    for (const auto& r : reports) {
        if (r.check_id.rfind(prefix, 0) != 0) continue;
        ++*total;
        if (r.pass) ++pass;
    }
    return pass;
}

void print_line(int idx, const char* what, bool pass, int ok, int total, double wall,
                double budget, Outcome* out) {
    std::printf("[%s] criterion %d: %-46s %3d/%-3d checks  %7.1fs (budget %.0fs)\n",
                pass ? "PASS" : "FAIL", idx, what, ok, total, wall, budget);
    if (!pass) {
        out->pass = false;
        ++out->failures;
    }
    std::fflush(stdout);
}

}  // namespace

int main() {
    qcalc::RunConfig cfg;  // defaults: q=2, p=3, tol_quad=1e-8, eps=0.5, margin=0.3
    Outcome out;

    // criteria 1-2 share the special suite; per-check runtimes split the budget
    {
        const auto t0 = Clock::now();
        const auto reports = qcalc::run_suite(cfg, qcalc::Suite::special);
        const double wall = seconds_since(t0);
        double wall_funceq = 0.0, wall_recip = 0.0;
        for (const auto& r : reports) {
            if (r.check_id.rfind("special.theta_funceq", 0) == 0) wall_funceq += 1e-3 * r.runtime_ms;
            if (r.check_id.rfind("special.reciprocal", 0) == 0) wall_recip += 1e-3 * r.runtime_ms;
        }
        (void)wall;
        int t1 = 0, t2 = 0;
        const int p1 = passed_of(reports, "special.theta_funceq", &t1);
        print_line(1, "Theta functional equation, rel < 1e-11", p1 == t1 && wall_funceq < 5.0, p1,
                   t1, wall_funceq, 5.0, &out);
        const int p2 = passed_of(reports, "special.reciprocal", &t2);
        print_line(2, "reciprocal identity, rel < 1e-10", p2 == t2 && wall_recip < 2.0, p2, t2,
                   wall_recip, 2.0, &out);
    }

    {
        const auto t0 = Clock::now();
        const auto reports = qcalc::run_suite(cfg, qcalc::Suite::moments);
        const double wall = seconds_since(t0);
        int total = 0;
        const int ok = passed_of(reports, "moments.", &total);
        print_line(3, "moment identities, rel < 1e-8, dir-independent", ok == total && wall < 30.0,
                   ok, total, wall, 30.0, &out);
    }

    {
        const auto t0 = Clock::now();
        const auto reports = qcalc::run_suite(cfg, qcalc::Suite::cauchy);
        const double wall = seconds_since(t0);
        int total = 0;
        const int ok = passed_of(reports, "cauchy.", &total);
        print_line(4, "Cauchy kernels, 30+30 triples, rel < 1e-7", ok == total && wall < 60.0, ok,
                   total, wall, 60.0, &out);
    }

    {
        const auto t0 = Clock::now();
        const auto reports = qcalc::run_suite(cfg, qcalc::Suite::theorems);
        const double wall = seconds_since(t0);
        int total = 0;
        const int ok = passed_of(reports, "theorems.", &total);
        print_line(5, "derivative representations + corollary branches", ok == total && wall < 600.0,
                   ok, total, wall, 600.0, &out);
    }

    {
        const auto t0 = Clock::now();
        const auto reports = qcalc::run_suite(cfg, qcalc::Suite::kernel);
        const double wall = seconds_since(t0);
        int total = 0;
        const int ok = passed_of(reports, "kernel.", &total);
        print_line(6, "(p,q) kernel moments and T operator", ok == total && wall < 1200.0, ok,
                   total, wall, 1200.0, &out);
    }

    {
        const auto t0 = Clock::now();
        const auto reports = qcalc::run_suite(cfg, qcalc::Suite::bounds);
        const double wall = seconds_since(t0);
        int total = 0;
        const int ok = passed_of(reports, "bounds.", &total);
        print_line(7, "growth-bound certificates", ok == total && wall < 60.0, ok, total, wall,
                   60.0, &out);
    }

    {   // determinism: identical config + seed -> byte-identical reports
        const auto t0 = Clock::now();
        bool identical = true;
        int total = 0, ok = 0;
        for (qcalc::Suite s : {qcalc::Suite::special, qcalc::Suite::moments, qcalc::Suite::cauchy,
                               qcalc::Suite::bounds, qcalc::Suite::kernel}) {
            const std::string a = qcalc::report_to_json(cfg, qcalc::run_suite(cfg, s)).dump();
            const std::string b = qcalc::report_to_json(cfg, qcalc::run_suite(cfg, s)).dump();
            ++total;
            if (a == b) ++ok;
        }
        identical = ok == total;
        print_line(8, "byte-identical reports across reruns", identical, ok, total,
                   seconds_since(t0), 1800.0, &out);
    }

    std::printf("%s: %d criterion(s) failed\n", out.pass ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                out.failures);
    return out.failures;
}
