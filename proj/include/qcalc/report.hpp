#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>

namespace qcalc {

/// A value that is either real or complex; checks compare against both kinds.
struct CheckValue {
    std::complex<double> v{0.0, 0.0};
    bool is_complex = false;

    CheckValue() = default;
    CheckValue(double x) : v(x, 0.0), is_complex(false) {}
    CheckValue(std::complex<double> z) : v(z), is_complex(true) {}

    double abs() const { return std::abs(v); }
};

/// Structured record of one verification run.
///
/// `pass` follows a single rule everywhere: the relative error must not
/// exceed max(tolerance, 10 * error_estimate / |expected|), falling back to
/// an absolute comparison when the expected value is zero.
struct CheckReport {
    std::string check_id;
    std::map<std::string, std::string> params;
    CheckValue expected;
    CheckValue computed;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double error_estimate = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::int64_t runtime_ms = 0;
};

/// Fills abs_err/rel_err/pass from expected, computed, tolerance and the
/// quadrature error estimate already stored in the report.
inline void finalize_check(CheckReport& r) {
    r.abs_err = std::abs(r.expected.v - r.computed.v);
    const double scale = r.expected.abs();
    if (scale > 0.0) {
        r.rel_err = r.abs_err / scale;
        r.pass = r.rel_err <= std::max(r.tolerance, 10.0 * r.error_estimate / scale);
    } else {
        r.rel_err = r.abs_err;
        r.pass = r.abs_err <= std::max(r.tolerance, 10.0 * r.error_estimate);
    }
}

inline CheckReport make_check(std::string id, CheckValue expected, CheckValue computed,
                              double tolerance, double error_estimate = 0.0) {
    CheckReport r;
    r.check_id = std::move(id);
    r.expected = expected;
    r.computed = computed;
    r.tolerance = tolerance;
    r.error_estimate = error_estimate;
    finalize_check(r);
    return r;
}

}  // namespace qcalc
