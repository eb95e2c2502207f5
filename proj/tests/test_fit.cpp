#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sfgsim/fit.hpp"

using namespace sfgsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SpectralConfig reference_config() {
    SpectralConfig cfg;
    cfg.dc_bandwidth_hz = 8.2e12;
    cfg.uc_bandwidth_hz = 1e11;
    cfg.pump_bandwidth_hz = 1e7;
    return cfg;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
    return out;
}

}  // namespace

TEST_CASE("alpha fit recovers the generating coefficient exactly", "[fit]") {
    auto cfg = reference_config();
    auto ns = log_grid(1e-3, 0.1, 7);
    std::vector<double> counts;
    for (double n : ns) counts.push_back(2.5 * cfg.dc_bandwidth_hz * (n + n * n));

    for (auto w : {fit::Weighting::uniform, fit::Weighting::poisson}) {
        auto f = fit::fit_alpha(ns, counts, cfg, w);
        CHECK_THAT(f.alpha, WithinRel(2.5, 1e-12));
        CHECK(f.normalized_residual < 1e-12);
    }
}

TEST_CASE("alpha fit is equivariant under rescaling the counts", "[fit]") {
    auto cfg = reference_config();
    auto ns = log_grid(1e-3, 0.1, 6);
    std::vector<double> counts, scaled;
    for (double n : ns) {
        double y = 0.8 * cfg.dc_bandwidth_hz * (n + n * n) * (1.0 + 0.03 * std::sin(n * 1e3));
        counts.push_back(y);
        scaled.push_back(7.0 * y);
    }
    for (auto w : {fit::Weighting::uniform, fit::Weighting::poisson}) {
        auto base = fit::fit_alpha(ns, counts, cfg, w);
        auto big = fit::fit_alpha(ns, scaled, cfg, w);
        CHECK_THAT(big.alpha, WithinRel(7.0 * base.alpha, 1e-12));
        CHECK_THAT(big.normalized_residual, WithinRel(base.normalized_residual, 1e-10));
    }
}

TEST_CASE("alpha fit exposes a shape mismatch on purely quadratic data", "[fit]") {
    auto cfg = reference_config();
    std::vector<double> ns = {1e-3, 3.16228e-3, 1e-2, 3.16228e-2, 1e-1};
    std::vector<double> counts;
    for (double n : ns) counts.push_back(cfg.dc_bandwidth_hz * n * n);

    auto f = fit::fit_alpha(ns, counts, cfg);
    // Hand-evaluated residual for this design is about 0.20; the point is that the
    // misfit is large and systematic, not noise-level.
    CHECK(f.normalized_residual > 0.15);
    CHECK(f.normalized_residual < 0.35);
}

TEST_CASE("alpha fit input validation", "[fit]") {
    auto cfg = reference_config();
    CHECK_THROWS_AS(fit::fit_alpha({}, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(fit::fit_alpha({0.1}, {1.0, 2.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(fit::fit_alpha({0.1}, {0.0}, cfg, fit::Weighting::poisson),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit::fit_alpha({-0.1}, {1.0}, cfg), std::invalid_argument);
}

TEST_CASE("log-log fit recovers an exact power law", "[fit]") {
    auto xs = log_grid(0.01, 10.0, 9);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, 1.7));

    auto f = fit::loglog_fit(xs, ys);
    CHECK_THAT(f.slope, WithinRel(1.7, 1e-12));
    CHECK_THAT(f.intercept, WithinAbs(std::log(3.0), 1e-12));
    CHECK(f.slope_stderr < 1e-12);

    CHECK_THROWS_AS(fit::loglog_fit({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit::loglog_fit({1.0, -2.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("two-point slope matches the closed form", "[fit]") {
    CHECK_THAT(fit::twopoint_slope(1.0, 2.0, 10.0, 200.0), WithinRel(2.0, 1e-13));
    CHECK_THAT(fit::twopoint_slope(0.5, 4.0, 2.0, 4.0), WithinAbs(0.0, 1e-13));
    CHECK_THROWS_AS(fit::twopoint_slope(1.0, 1.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("quadratic fit recovers both coefficients and their uncertainties",
          "[fit]") {
    auto xs = log_grid(1e-3, 0.2, 8);
    std::vector<double> ys, sig;
    for (double x : xs) {
        ys.push_back(2.0 * x + 5.0 * x * x);
        sig.push_back(0.01 * (x + 1e-3));
    }
    auto f = fit::quadratic_fit(xs, ys, sig);
    CHECK_THAT(f.c1, WithinRel(2.0, 1e-10));
    CHECK_THAT(f.c2, WithinRel(5.0, 1e-8));
    CHECK(f.chi2 < 1e-12);
    CHECK(f.sigma_c1 > 0.0);
    CHECK(f.sigma_c2 > 0.0);

    // Unweighted variant on noise-free data collapses the error estimates.
    auto g = fit::quadratic_fit(xs, ys);
    CHECK_THAT(g.c1, WithinRel(2.0, 1e-10));
    CHECK(g.sigma_c1 < 1e-9);
}

TEST_CASE("quadratic fit flags degenerate designs", "[fit]") {
    CHECK_THROWS_AS(fit::quadratic_fit({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit::quadratic_fit({1.0, 2.0}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit::quadratic_fit({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0},
                                       {0.1, -0.1, 0.1}),
                    std::invalid_argument);
}

TEST_CASE("quadratic fit separates a linear component at high significance",
          "[fit]") {
    // Counts-scale data following c1 n + c2 n^2 with Poisson-scale errors: the
    // linear coefficient must be resolvable at many sigma (acceptance relies on it).
    auto xs = log_grid(1e-3, 0.2, 6);
    std::vector<double> ys, sig;
    for (double x : xs) {
        double y = 1e4 * (x + x * x);
        ys.push_back(y);
        sig.push_back(std::sqrt(y));
    }
    auto f = fit::quadratic_fit(xs, ys, sig);
    CHECK(f.c1 / f.sigma_c1 > 5.0);
    CHECK_THAT(f.c1, WithinRel(1e4, 1e-9));
    CHECK_THAT(f.c2, WithinRel(1e4, 1e-6));
}
