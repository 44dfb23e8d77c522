#pragma once

#include <numbers>

namespace qlattice::constants {

// CODATA 2018.
inline constexpr double planck_h = 6.62607015000e-34;          // J s (exact)
inline constexpr double speed_of_light = 299792458.000;        // m / s (exact)
inline constexpr double reduced_planck = planck_h / (2.0 * std::numbers::pi);
inline constexpr double electron_mass = 9.10938370150e-31;     // kg
inline constexpr double electron_compton_wavelength = 2.42631023867e-12;  // m

}  // namespace qlattice::constants
