// Command-line verification driver: `check` runs an identity suite and
// writes a machine-diffable JSON report, `eval` evaluates one special
// function at one point, `report` re-renders a saved JSON report.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcalc/qcalc.hpp"

namespace {

struct ConfigCli {
    std::optional<std::string> config_path;
    std::optional<double> q, p, tol_series, tol_quad, eps_contour, margin;
    std::optional<std::string> alpha_policy;
    std::optional<int> k_max;
    std::optional<long> seed;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "JSON config file");
        app.add_option("--q", q, "base q (> 1)");
        app.add_option("--p", p, "second base p for (p,q) checks");
        app.add_option("--tol-series", tol_series, "series truncation tolerance");
        app.add_option("--tol-quad", tol_quad, "quadrature tolerance");
        app.add_option("--eps-contour", eps_contour, "contour radius for the representations");
        app.add_option("--margin", margin, "direction margin in radians");
        app.add_option("--alpha-policy", alpha_policy, "'estimate' or a fixed numeric value");
        app.add_option("--k-max", k_max, "largest derivative order exercised");
        app.add_option("--seed", seed, "sampler seed");
    }

    qcalc::RunConfig resolve() const {
        qcalc::RunConfig cfg;
        if (config_path) {
            std::ifstream in(*config_path);
            if (!in) throw CLI::ValidationError("--config", "cannot open " + *config_path);
            qcalc::Json j = qcalc::Json::parse(in);
            cfg = qcalc::config_from_json(j);
        }
        if (q) cfg.q = *q;
        if (p) cfg.p = *p;
        if (tol_series) cfg.tol_series = *tol_series;
        if (tol_quad) cfg.tol_quad = *tol_quad;
        if (eps_contour) cfg.eps_contour = *eps_contour;
        if (margin) cfg.margin = *margin;
        if (alpha_policy) cfg.alpha_policy = *alpha_policy;
        if (k_max) cfg.k_max = *k_max;
        if (seed) cfg.seed = *seed;
        cfg.validate();
        return cfg;
    }
};

int run_check(const ConfigCli& cli, const std::string& suite_name,
              const std::optional<std::string>& report_path) {
    const qcalc::RunConfig cfg = cli.resolve();
    const qcalc::Suite suite = qcalc::suite_from_name(suite_name);
    const auto reports = qcalc::run_suite(cfg, suite);
    std::cout << qcalc::render_table(reports);
    if (report_path) {
        std::ofstream out(*report_path);
        if (!out) {
            std::cerr << "cannot write report to " << *report_path << "\n";
            return 2;
        }
        out << qcalc::report_to_json(cfg, reports).dump(2) << "\n";
    }
    return qcalc::all_pass(reports) ? 0 : 1;
}

int run_eval(const ConfigCli& cli, const std::string& target, const std::string& z_text,
             bool log_polar) {
    const qcalc::RunConfig cfg = cli.resolve();
    const auto comma = z_text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--z", "expected 're,im' (or 'log_r,arg' with --log-polar)");
    const double a = std::stod(z_text.substr(0, comma));
    const double b = std::stod(z_text.substr(comma + 1));
    const qcalc::LogPolarPoint z = log_polar
                                       ? qcalc::LogPolarPoint{a, b}
                                       : qcalc::LogPolarPoint::from_complex(qcalc::Complex(a, b));
    const qcalc::EvalOutput out = qcalc::eval_point(cfg, target, z);
    std::cout.precision(17);
    std::cout << target << "(" << z_text << (log_polar ? " [log-polar]" : "") << ") = "
              << out.value.real() << (out.value.imag() < 0 ? " - " : " + ")
              << std::abs(out.value.imag()) << "i\n"
              << "  " << out.unit << " used: " << out.work
              << ", certified error: " << out.certified_error << "\n";
    return 0;
}

int run_report(const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "cannot open " << in_path << "\n";
        return 2;
    }
    const qcalc::Json j = qcalc::Json::parse(in);
    std::vector<qcalc::CheckReport> reports;
    for (const auto& c : j.at("checks")) {
        qcalc::CheckReport r;
        r.check_id = c.at("check_id").get<std::string>();
        auto load_value = [](const qcalc::Json& v) {
            if (v.is_object())
                return qcalc::CheckValue(
                    qcalc::Complex(v.at("re").get<double>(), v.at("im").get<double>()));
            return qcalc::CheckValue(v.get<double>());
        };
        r.expected = load_value(c.at("expected"));
        r.computed = load_value(c.at("computed"));
        r.abs_err = c.at("abs_err").get<double>();
        r.rel_err = c.at("rel_err").get<double>();
        r.error_estimate = c.at("error_estimate").get<double>();
        r.tolerance = c.at("tolerance").get<double>();
        r.pass = c.at("pass").get<bool>();
        reports.push_back(std::move(r));
    }
    std::cout << qcalc::render_table(reports, /*with_runtime=*/false);
    return qcalc::all_pass(reports) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical q-calculus identity verifier"};
    app.require_subcommand(1);

    ConfigCli check_cfg, eval_cfg;
    std::string suite_name, target, z_text, in_path;
    std::optional<std::string> report_path;
    bool log_polar = false;

    CLI::App* check = app.add_subcommand("check", "run a verification suite");
    check->add_option("--suite", suite_name,
                      "one of: special, moments, cauchy, theorems, kernel, bounds, all")
        ->required();
    check->add_option("--report", report_path, "write the JSON report here");
    check_cfg.attach(*check);

    CLI::App* eval = app.add_subcommand("eval", "evaluate one function at one point");
    eval->add_option("--target", target, "theta, exp_q, E_q, e1, e2, e_tilde")->required();
    eval->add_option("--z", z_text, "point as 're,im'")->required();
    eval->add_flag("--log-polar", log_polar, "interpret --z as 'log_r,arg'");
    eval_cfg.attach(*eval);

    CLI::App* report = app.add_subcommand("report", "render a saved JSON report as a table");
    report->add_option("--in", in_path, "report file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(check_cfg, suite_name, report_path);
        if (eval->parsed()) return run_eval(eval_cfg, target, z_text, log_polar);
        return run_report(in_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
