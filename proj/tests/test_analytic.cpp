#include <catch2/catch_amalgamated.hpp>

#include "sfgsim/analytic.hpp"
#include "sfgsim/config.hpp"

using namespace sfgsim;
using Catch::Matchers::WithinRel;

namespace {

SpectralConfig reference_config() {
    SpectralConfig cfg;
    cfg.pump_wavelength_m = 532e-9;
    cfg.pump_bandwidth_hz = 1e7;
    cfg.dc_center_wavelength_m = 1064e-9;
    cfg.dc_bandwidth_hz = 8.2e12;
    cfg.uc_bandwidth_hz = 1e11;
    return cfg;
}

}  // namespace

TEST_CASE("wavelength bandwidth converts through f = c/lambda dispersion",
          "[analytic]") {
    // c * 31e-9 / (1064e-9)^2, frozen from an independent evaluation.
    CHECK_THAT(analytic::bandwidth_nm_to_hz(31.0, 1064e-9),
               WithinRel(8.209167948654529e12, 1e-13));
    // Linear in width, inverse-square in center wavelength.
    CHECK_THAT(analytic::bandwidth_nm_to_hz(62.0, 1064e-9),
               WithinRel(1.6418335897309058e13, 1e-13));
    CHECK_THAT(analytic::bandwidth_nm_to_hz(31.0, 532e-9),
               WithinRel(3.2836671794618116e13, 1e-13));

    CHECK_THROWS_AS(analytic::bandwidth_nm_to_hz(532.0, 1064e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytic::bandwidth_nm_to_hz(-1.0, 1064e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytic::bandwidth_nm_to_hz(31.0, 0.0), std::invalid_argument);
}

TEST_CASE("flux to power conversion uses the photon energy at the band center",
          "[analytic]") {
    // h*c/1064nm = 1.8669603920572636e-19 J per photon.
    CHECK_THAT(analytic::flux_to_power(1.0, 1064e-9),
               WithinRel(1.8669603920572636e-19, 1e-13));
    CHECK_THAT(analytic::flux_to_power(8.2e12, 1064e-9),
               WithinRel(1.5309075214869562e-6, 1e-13));
    // Round trip.
    double p = analytic::flux_to_power(3.7e9, 1064e-9);
    CHECK_THAT(analytic::power_to_flux(p, 1064e-9), WithinRel(3.7e9, 1e-13));
    CHECK_THROWS_AS(analytic::flux_to_power(-1.0, 1064e-9), std::invalid_argument);
}

TEST_CASE("crossover flux equals the downconversion bandwidth", "[analytic]") {
    auto cfg = reference_config();
    CHECK(analytic::crossover_flux(cfg) == cfg.dc_bandwidth_hz);

    // With the bandwidth derived from the 31 nm slice the crossover lands within
    // a tenth of a percent of the quoted 8.2e12 photons/s.
    cfg.dc_bandwidth_hz = analytic::bandwidth_nm_to_hz(31.0, 1064e-9);
    double flux = analytic::crossover_flux(cfg);
    CHECK_THAT(flux, WithinRel(8.2e12, 0.02));
    CHECK_THAT(analytic::flux_to_power(flux, 1064e-9), WithinRel(1.5e-6, 0.03));
}

TEST_CASE("operating point ties occupation to flux", "[analytic]") {
    auto cfg = reference_config();
    OperatingPoint op(0.25, cfg);
    CHECK(op.flux_hz == 0.25 * cfg.dc_bandwidth_hz);
    auto back = OperatingPoint::from_flux(op.flux_hz, cfg);
    CHECK_THAT(back.n, WithinRel(0.25, 1e-15));
    CHECK_THROWS_AS(OperatingPoint(-0.1, cfg), std::invalid_argument);
}

TEST_CASE("correlated rate carries linear plus quadratic occupation terms",
          "[analytic]") {
    auto cfg = reference_config();
    CHECK_THAT(analytic::correlated_rate(cfg, 1e-3),
               WithinRel(8.2e12 * 1.001e-3, 1e-13));
    CHECK_THAT(analytic::correlated_rate(cfg, 1.0), WithinRel(2.0 * 8.2e12, 1e-13));
    CHECK(analytic::correlated_rate(cfg, 0.0) == 0.0);
    // alpha scales the whole prediction.
    CHECK_THAT(analytic::correlated_rate(cfg, 0.01, 0.5),
               WithinRel(0.5 * analytic::correlated_rate(cfg, 0.01), 1e-15));
    CHECK_THROWS_AS(analytic::correlated_rate(cfg, -1e-9), std::invalid_argument);
    CHECK_THROWS_AS(analytic::correlated_rate(cfg, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("uncorrelated rate is quadratic with the receiver acceptance prefactor",
          "[analytic]") {
    auto cfg = reference_config();
    CHECK_THAT(analytic::uncorrelated_rate(cfg, 0.1), WithinRel(1e11 * 0.01, 1e-13));
    CHECK(analytic::uncorrelated_rate(cfg, 0.0) == 0.0);
    // Quadratic scaling: doubling n quadruples the rate.
    CHECK_THAT(analytic::uncorrelated_rate(cfg, 0.2),
               WithinRel(4.0 * analytic::uncorrelated_rate(cfg, 0.1), 1e-13));
    // Classical beam of the same flux converts at the dc-bandwidth-weighted n^2.
    CHECK_THAT(analytic::classical_correlated_rate(cfg, 0.1),
               WithinRel(8.2e12 * 0.01, 1e-13));
}

TEST_CASE("rate ratio and its mode-count bound", "[analytic]") {
    auto cfg = reference_config();
    auto rr = analytic::rate_ratio(cfg, 1.0);
    // (8.2e12/1e11) * 2 = 164, exact in double arithmetic.
    CHECK(rr.ratio == 164.0);
    CHECK(rr.bound == (8.2e12 / 1e7) * 2.0);
    CHECK(rr.ratio <= rr.bound);

    // The bound is attained when the acceptance narrows to the pump bandwidth.
    auto tight = cfg;
    tight.uc_bandwidth_hz = tight.pump_bandwidth_hz;
    auto rr2 = analytic::rate_ratio(tight, 0.3);
    CHECK_THAT(rr2.ratio, WithinRel(rr2.bound, 1e-15));

    // Ratio grows without bound as n -> 0; n = 0 is a domain error.
    CHECK(analytic::rate_ratio(cfg, 1e-6).ratio >
          analytic::rate_ratio(cfg, 1e-3).ratio);
    CHECK_THROWS_AS(analytic::rate_ratio(cfg, 0.0), std::invalid_argument);
}

TEST_CASE("log-log slope interpolates between linear and quadratic regimes",
          "[analytic]") {
    CHECK_THAT(analytic::loglog_slope(1e-3), WithinRel(1.000999000999001, 1e-14));
    CHECK_THAT(analytic::loglog_slope(0.185), WithinRel(1.1561181434599157, 1e-14));
    CHECK_THAT(analytic::loglog_slope(1e-6), WithinRel(1.000000999999, 1e-9));
    CHECK_THAT(analytic::loglog_slope(1e6), WithinRel(2.0, 1e-5));

    // Strictly increasing in n, bounded by (1, 2).
    double prev = 1.0;
    for (double n = 1e-6; n < 1e4; n *= 10.0) {
        double s = analytic::loglog_slope(n);
        CHECK(s > prev);
        CHECK(s > 1.0);
        CHECK(s < 2.0);
        prev = s;
    }
    CHECK_THROWS_AS(analytic::loglog_slope(0.0), std::invalid_argument);
}

TEST_CASE("correlated rate dominates the classical reference at every occupation",
          "[analytic]") {
    auto cfg = reference_config();
    for (double n = 1e-6; n <= 10.0; n *= 3.0) {
        CHECK(analytic::correlated_rate(cfg, n) >
              analytic::classical_correlated_rate(cfg, n));
        // The advantage factor is (n+1)/n, huge at low flux.
        CHECK_THAT(analytic::correlated_rate(cfg, n) /
                       analytic::classical_correlated_rate(cfg, n),
                   WithinRel((n + 1.0) / n, 1e-12));
    }
}

TEST_CASE("spectral config rejects inconsistent bandwidth ordering", "[analytic]") {
    auto cfg = reference_config();
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.uc_bandwidth_hz = 1e6;  // narrower than the pump
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.dc_bandwidth_hz = 1e10;  // narrower than the acceptance
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.pump_bandwidth_hz = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THAT(cfg.mode_count(), WithinRel(8.2e5, 1e-13));
}

TEST_CASE("prediction bundle is self-consistent", "[analytic]") {
    auto cfg = reference_config();
    auto p = analytic::predict(cfg, 0.05, 2.0);
    CHECK(p.n == 0.05);
    CHECK_THAT(p.flux_hz, WithinRel(0.05 * 8.2e12, 1e-15));
    CHECK_THAT(p.correlated_hz, WithinRel(analytic::correlated_rate(cfg, 0.05, 2.0), 1e-15));
    CHECK_THAT(p.uncorrelated_hz,
               WithinRel(analytic::uncorrelated_rate(cfg, 0.05, 2.0), 1e-15));
    CHECK_THAT(p.slope, WithinRel(analytic::loglog_slope(0.05), 1e-15));
}
