#pragma once

#include <cmath>
#include <stdexcept>

#include "sfgsim/config.hpp"
#include "sfgsim/constants.hpp"

namespace sfgsim::analytic {

// Full bandwidth in wavelength (meters) around center_wavelength -> full bandwidth
// in Hz, via the first-order dispersion of f = c/lambda: df = c * dl / lambda^2.
// The linearization breaks down for slices approaching the carrier; widths of
// half the center wavelength or more are rejected.
inline double bandwidth_wavelength_to_hz(double width_m, double center_wavelength_m) {
    if (!(center_wavelength_m > 0.0))
        throw std::invalid_argument("bandwidth_wavelength_to_hz: center must be > 0");
    if (!(width_m > 0.0))
        throw std::invalid_argument("bandwidth_wavelength_to_hz: width must be > 0");
    if (width_m >= 0.5 * center_wavelength_m)
        throw std::invalid_argument(
            "bandwidth_wavelength_to_hz: width too large for linear conversion");
    return speed_of_light * width_m / (center_wavelength_m * center_wavelength_m);
}

inline double bandwidth_nm_to_hz(double width_nm, double center_wavelength_m) {
    return bandwidth_wavelength_to_hz(width_nm * 1e-9, center_wavelength_m);
}

// Photon flux (photons/s at the given wavelength) -> optical power in watts.
inline double flux_to_power(double flux_hz, double wavelength_m) {
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("flux_to_power: wavelength must be > 0");
    if (!(flux_hz >= 0.0))
        throw std::invalid_argument("flux_to_power: flux must be >= 0");
    return flux_hz * planck_constant * speed_of_light / wavelength_m;
}

inline double power_to_flux(double power_w, double wavelength_m) {
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("power_to_flux: wavelength must be > 0");
    if (!(power_w >= 0.0))
        throw std::invalid_argument("power_to_flux: power must be >= 0");
    return power_w * wavelength_m / (planck_constant * speed_of_light);
}

// Flux at which the photon occupation per mode reaches one: one photon per
// coherence time across the downconverted band, numerically equal to the band's
// bandwidth. Above it the pairwise (nonclassical) and classical contributions to
// the upconversion rate cross over.
inline double crossover_flux(const SpectralConfig& config) {
    config.validate();
    return config.dc_bandwidth_hz;
}

// Correlated (pair-driven) sum-frequency rate: alpha * Delta_dc * (n + n^2).
// The linear term is the nonclassical signature: each photon converts with its
// own twin, so the rate stays linear in flux down to arbitrarily low n.
inline double correlated_rate(const SpectralConfig& config, double n,
                              double alpha = 1.0) {
    config.validate();
    if (!(n >= 0.0)) throw std::invalid_argument("correlated_rate: n must be >= 0");
    if (!(alpha > 0.0))
        throw std::invalid_argument("correlated_rate: alpha must be > 0");
    return alpha * config.dc_bandwidth_hz * (n + n * n);
}

// Uncorrelated (accidental) sum-frequency rate: alpha * delta_uc * n^2. Photons
// from different pairs only convert when their frequencies happen to sum into the
// narrow upconversion acceptance, hence the delta_uc prefactor and pure n^2.
inline double uncorrelated_rate(const SpectralConfig& config, double n,
                                double alpha = 1.0) {
    config.validate();
    if (!(n >= 0.0)) throw std::invalid_argument("uncorrelated_rate: n must be >= 0");
    if (!(alpha > 0.0))
        throw std::invalid_argument("uncorrelated_rate: alpha must be > 0");
    return alpha * config.uc_bandwidth_hz * n * n;
}

// Rate a classical (coherent, pair-free) beam of the same flux would produce:
// alpha * Delta_dc * n^2. Reference curve for the low-flux advantage.
inline double classical_correlated_rate(const SpectralConfig& config, double n,
                                        double alpha = 1.0) {
    config.validate();
    if (!(n >= 0.0))
        throw std::invalid_argument("classical_correlated_rate: n must be >= 0");
    if (!(alpha > 0.0))
        throw std::invalid_argument("classical_correlated_rate: alpha must be > 0");
    return alpha * config.dc_bandwidth_hz * n * n;
}

struct RateRatio {
    double ratio;  // correlated / uncorrelated at the same n
    double bound;  // N (n+1)/n with N = dc_bandwidth / pump_bandwidth
};

// Correlated-to-accidental ratio (Delta_dc/delta_uc) (n+1)/n and its upper bound
// N (n+1)/n reached when the receiver acceptance narrows to the pump bandwidth.
// Diverges as n -> 0; n = 0 is a domain error.
inline RateRatio rate_ratio(const SpectralConfig& config, double n) {
    config.validate();
    if (!(n > 0.0))
        throw std::invalid_argument("rate_ratio: n must be > 0 (ratio diverges)");
    RateRatio out;
    out.ratio = (config.dc_bandwidth_hz / config.uc_bandwidth_hz) * (n + 1.0) / n;
    out.bound = config.mode_count() * (n + 1.0) / n;
    return out;
}

// Local log-log slope of the correlated rate vs n: d ln(n + n^2) / d ln n
// = (1 + 2n)/(1 + n). Runs from 1 (pairwise regime) to 2 (classical regime).
inline double loglog_slope(double n) {
    if (!(n > 0.0)) throw std::invalid_argument("loglog_slope: n must be > 0");
    return (1.0 + 2.0 * n) / (1.0 + n);
}

struct RatePrediction {
    double n = 0.0;
    double flux_hz = 0.0;
    double correlated_hz = 0.0;
    double uncorrelated_hz = 0.0;
    double classical_hz = 0.0;
    double slope = 0.0;
};

inline RatePrediction predict(const SpectralConfig& config, double n,
                              double alpha = 1.0) {
    RatePrediction p;
    p.n = n;
    p.flux_hz = OperatingPoint(n, config).flux_hz;
    p.correlated_hz = correlated_rate(config, n, alpha);
    p.uncorrelated_hz = uncorrelated_rate(config, n, alpha);
    p.classical_hz = classical_correlated_rate(config, n, alpha);
    p.slope = n > 0.0 ? loglog_slope(n) : 1.0;
    return p;
}

}  // namespace sfgsim::analytic
