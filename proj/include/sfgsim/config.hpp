#pragma once

#include <stdexcept>
#include <string>

#include "sfgsim/constants.hpp"

namespace sfgsim {

// Spectral layout of the source and the upconversion receiver. All widths are
// full bandwidths in Hz; wavelengths in meters. Invariants: every field positive,
// uc_bandwidth >= pump_bandwidth (phase matching cannot be narrower than the pump),
// dc_bandwidth >= uc_bandwidth (the receiver selects a slice of the downconverted band).
struct SpectralConfig {
    double pump_wavelength_m = 532e-9;
    double pump_bandwidth_hz = 1e7;
    double dc_center_wavelength_m = 1064e-9;
    double dc_bandwidth_hz = 8.2e12;
    double uc_bandwidth_hz = 1e11;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("SpectralConfig: ") + name +
                                            " must be positive");
        };
        positive(pump_wavelength_m, "pump_wavelength_m");
        positive(pump_bandwidth_hz, "pump_bandwidth_hz");
        positive(dc_center_wavelength_m, "dc_center_wavelength_m");
        positive(dc_bandwidth_hz, "dc_bandwidth_hz");
        positive(uc_bandwidth_hz, "uc_bandwidth_hz");
        if (uc_bandwidth_hz < pump_bandwidth_hz)
            throw std::invalid_argument(
                "SpectralConfig: uc_bandwidth_hz must be >= pump_bandwidth_hz");
        if (dc_bandwidth_hz < uc_bandwidth_hz)
            throw std::invalid_argument(
                "SpectralConfig: dc_bandwidth_hz must be >= uc_bandwidth_hz");
    }

    // Number of resolvable mode pairs across the downconverted band.
    double mode_count() const { return dc_bandwidth_hz / pump_bandwidth_hz; }
};

// Photon occupation per mode and the photon flux it implies. flux is photons/s
// summed over the whole downconverted band: flux = n * dc_bandwidth.
struct OperatingPoint {
    double n = 0.0;
    double flux_hz = 0.0;

    OperatingPoint() = default;
    OperatingPoint(double n_, const SpectralConfig& config)
        : n(n_), flux_hz(n_ * config.dc_bandwidth_hz) {
        if (!(n_ >= 0.0)) throw std::invalid_argument("OperatingPoint: n must be >= 0");
    }

    static OperatingPoint from_flux(double flux, const SpectralConfig& config) {
        if (!(flux >= 0.0))
            throw std::invalid_argument("OperatingPoint: flux must be >= 0");
        return OperatingPoint(flux / config.dc_bandwidth_hz, config);
    }
};

// Detection chain: collection*quantum efficiency, dark count rate, integration time.
struct DetectorModel {
    double collection_efficiency = 0.06;
    double dark_rate_hz = 50.0;
    double integration_time_s = 5.0;

    void validate() const {
        if (!(collection_efficiency > 0.0 && collection_efficiency <= 1.0))
            throw std::invalid_argument(
                "DetectorModel: collection_efficiency must be in (0, 1]");
        if (!(dark_rate_hz >= 0.0))
            throw std::invalid_argument("DetectorModel: dark_rate_hz must be >= 0");
        if (!(integration_time_s > 0.0))
            throw std::invalid_argument("DetectorModel: integration_time_s must be > 0");
    }
};

// Desk-scale spectral layout for event-level simulation: bandwidth ratios of the
// default physical config are preserved (dc/uc = 82, uc/pump >= 1) while absolute
// rates drop to a range a laptop can sample event by event. Ratio-invariant results
// (slopes, correlated/accidental ratios) carry over unchanged.
inline SpectralConfig desk_scale_config(double dc_bandwidth_hz = 1e6,
                                        double dc_to_uc_ratio = 82.0,
                                        double pump_bandwidth_hz = 10.0) {
    SpectralConfig cfg;
    cfg.dc_bandwidth_hz = dc_bandwidth_hz;
    cfg.uc_bandwidth_hz = dc_bandwidth_hz / dc_to_uc_ratio;
    cfg.pump_bandwidth_hz = pump_bandwidth_hz;
    cfg.validate();
    return cfg;
}

}  // namespace sfgsim
