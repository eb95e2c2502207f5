#pragma once

namespace sfgsim {

// CODATA 2018 exact values (SI).
inline constexpr double speed_of_light = 299792458.0;        // m/s
inline constexpr double planck_constant = 6.62607015e-34;    // J s

inline constexpr double pi = 3.14159265358979323846;

}  // namespace sfgsim
