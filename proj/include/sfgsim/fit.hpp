#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sfgsim/analytic.hpp"
#include "sfgsim/config.hpp"

namespace sfgsim::fit {

enum class Weighting { uniform, poisson };

struct AlphaFit {
    double alpha = 0.0;
    // rms(y - model) / rms(y): scale-invariant misfit measure, computed unweighted
    // regardless of the fit weighting so the two weightings are comparable.
    double normalized_residual = 0.0;
};

// One-parameter least squares of counts = alpha * dc_bandwidth * (n + n^2).
// Poisson weighting takes per-point variance proportional to the observed counts,
// which keeps alpha-hat equivariant under rescaling all counts by a constant.
inline AlphaFit fit_alpha(const std::vector<double>& n_values,
                          const std::vector<double>& counts,
                          const SpectralConfig& config,
                          Weighting weighting = Weighting::uniform) {
    config.validate();
    if (n_values.size() != counts.size())
        throw std::invalid_argument("fit_alpha: size mismatch");
    if (n_values.empty()) throw std::invalid_argument("fit_alpha: no data");

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        double n = n_values[i];
        if (!(n >= 0.0)) throw std::invalid_argument("fit_alpha: n must be >= 0");
        double g = config.dc_bandwidth_hz * (n + n * n);
        double w = 1.0;
        if (weighting == Weighting::poisson) {
            if (!(counts[i] > 0.0))
                throw std::invalid_argument(
                    "fit_alpha: poisson weighting needs positive counts");
            w = 1.0 / counts[i];
        }
        num += w * g * counts[i];
        den += w * g * g;
    }
    if (!(den > 0.0)) throw std::invalid_argument("fit_alpha: degenerate design");

    AlphaFit out;
    out.alpha = num / den;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        double g = config.dc_bandwidth_hz * (n_values[i] + n_values[i] * n_values[i]);
        double r = counts[i] - out.alpha * g;
        ss_res += r * r;
        ss_tot += counts[i] * counts[i];
    }
    out.normalized_residual = ss_tot > 0.0 ? std::sqrt(ss_res / ss_tot) : 0.0;
    return out;
}

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;   // of ln y vs ln x
    double slope_stderr = 0.0;
};

// Ordinary least squares of ln y on ln x. Requires strictly positive data.
inline LogLogFit loglog_fit(const std::vector<double>& x,
                            const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("loglog_fit: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("loglog_fit: need >= 2 points");
    const std::size_t m = x.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0))
            throw std::invalid_argument("loglog_fit: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
    }
    double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("loglog_fit: degenerate abscissa");

    LogLogFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    if (m > 2) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double r = ly[i] - (out.intercept + out.slope * lx[i]);
            ss_res += r * r;
        }
        out.slope_stderr = std::sqrt(ss_res / double(m - 2) / sxx);
    }
    return out;
}

// Two-point slope in log-log space between adjacent samples.
inline double twopoint_slope(double x0, double y0, double x1, double y1) {
    if (!(x0 > 0.0 && x1 > 0.0 && y0 > 0.0 && y1 > 0.0) || x0 == x1)
        throw std::invalid_argument("twopoint_slope: invalid points");
    return std::log(y1 / y0) / std::log(x1 / x0);
}

struct QuadraticFit {
    double c1 = 0.0;         // linear coefficient
    double c2 = 0.0;         // quadratic coefficient
    double sigma_c1 = 0.0;
    double sigma_c2 = 0.0;
    double cov_c1c2 = 0.0;
    double chi2 = 0.0;
    std::size_t dof = 0;
};

// Weighted least squares of y = c1 x + c2 x^2. When sigma is non-empty it holds
// per-point standard deviations and the returned parameter errors are the exact
// generalized-least-squares ones; when empty, uniform weights are used and errors
// are scaled by the residual variance.
inline QuadraticFit quadratic_fit(const std::vector<double>& x,
                                  const std::vector<double>& y,
                                  const std::vector<double>& sigma = {}) {
    if (x.size() != y.size()) throw std::invalid_argument("quadratic_fit: size mismatch");
    if (!sigma.empty() && sigma.size() != x.size())
        throw std::invalid_argument("quadratic_fit: sigma size mismatch");
    if (x.size() < 3) throw std::invalid_argument("quadratic_fit: need >= 3 points");

    double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double w = 1.0;
        if (!sigma.empty()) {
            if (!(sigma[i] > 0.0))
                throw std::invalid_argument("quadratic_fit: sigma must be > 0");
            w = 1.0 / (sigma[i] * sigma[i]);
        }
        double u = x[i], u2 = u * u;
        s11 += w * u2;
        s12 += w * u2 * u;
        s22 += w * u2 * u2;
        b1 += w * u * y[i];
        b2 += w * u2 * y[i];
    }
    double det = s11 * s22 - s12 * s12;
    if (!(det > 0.0)) throw std::invalid_argument("quadratic_fit: singular design");

    QuadraticFit out;
    out.c1 = (s22 * b1 - s12 * b2) / det;
    out.c2 = (s11 * b2 - s12 * b1) / det;
    out.dof = x.size() - 2;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (out.c1 * x[i] + out.c2 * x[i] * x[i]);
        double w = sigma.empty() ? 1.0 : 1.0 / (sigma[i] * sigma[i]);
        out.chi2 += w * r * r;
    }
    double var1 = s22 / det, var2 = s11 / det, cov = -s12 / det;
    if (sigma.empty()) {
        double scale = out.dof > 0 ? out.chi2 / double(out.dof) : 0.0;
        var1 *= scale;
        var2 *= scale;
        cov *= scale;
    }
    out.sigma_c1 = std::sqrt(var1);
    out.sigma_c2 = std::sqrt(var2);
    out.cov_c1c2 = cov;
    return out;
}

}  // namespace sfgsim::fit
