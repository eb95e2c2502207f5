#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "sfgsim/experiment.hpp"

namespace sfgsim::report_io {

namespace detail {
inline std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace detail

inline std::string to_csv(const experiment::SweepCurve& curve) {
    std::string out = "drive,mean_rate,stddev\n";
    for (const auto& p : curve.points)
        out += detail::num(p.drive) + "," + detail::num(p.mean) + "," +
               detail::num(p.stddev) + "\n";
    return out;
}

inline nlohmann::ordered_json to_json(const experiment::SweepCurve& curve) {
    nlohmann::ordered_json j;
    j["mode"] = experiment::to_string(curve.mode);
    j["engine"] = experiment::to_string(curve.engine);
    j["fitted_slope"] = curve.fitted_slope;
    j["slope_stderr"] = curve.slope_stderr;
    j["endpoint_slope_low"] = curve.endpoint_slope_low;
    j["endpoint_slope_high"] = curve.endpoint_slope_high;
    if (curve.mode == experiment::SweepMode::pump_scaling) {
        j["fitted_alpha"] = curve.fitted_alpha;
        j["alpha_residual"] = curve.alpha_residual;
    }
    auto& pts = j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : curve.points) {
        nlohmann::ordered_json pj;
        pj["drive"] = p.drive;
        pj["mean_rate"] = p.mean;
        pj["stddev"] = p.stddev;
        pts.push_back(pj);
    }
    return j;
}

inline std::string to_csv(const experiment::CrossValidationReport& report) {
    std::string out =
        "n,analytic_correlated,analytic_uncorrelated,fock_correlated,"
        "fock_uncorrelated,stream_correlated,stream_correlated_sem,"
        "stream_uncorrelated,stream_uncorrelated_sem\n";
    for (const auto& r : report.rows)
        out += detail::num(r.n) + "," + detail::num(r.analytic_correlated) + "," +
               detail::num(r.analytic_uncorrelated) + "," +
               detail::num(r.fock_correlated) + "," +
               detail::num(r.fock_uncorrelated) + "," +
               detail::num(r.stream_correlated) + "," +
               detail::num(r.stream_correlated_sem) + "," +
               detail::num(r.stream_uncorrelated) + "," +
               detail::num(r.stream_uncorrelated_sem) + "\n";
    return out;
}

inline nlohmann::ordered_json to_json(const experiment::CrossValidationReport& report) {
    nlohmann::ordered_json j;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json rj;
        rj["n"] = r.n;
        rj["analytic"] = {{"correlated", r.analytic_correlated},
                          {"uncorrelated", r.analytic_uncorrelated}};
        rj["fock"] = {{"correlated", r.fock_correlated},
                      {"uncorrelated", r.fock_uncorrelated}};
        rj["stream"] = {{"correlated", r.stream_correlated},
                        {"correlated_sem", r.stream_correlated_sem},
                        {"uncorrelated", r.stream_uncorrelated},
                        {"uncorrelated_sem", r.stream_uncorrelated_sem}};
        rows.push_back(rj);
    }
    j["fock_quadratic_coefficient"] = report.fock_quadratic_coefficient;
    j["fock_max_relative_deviation"] = report.fock_max_relative_deviation;
    j["stream_max_sigma_deviation"] = report.stream_max_sigma_deviation;
    j["flags"] = report.flags;
    j["consistent"] = report.consistent;
    return j;
}

}  // namespace sfgsim::report_io
