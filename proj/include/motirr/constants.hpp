#pragma once

namespace motirr::constants {

inline constexpr double speed_of_light = 299'792'458.0;           // m/s, exact
inline constexpr double planck = 6.62607015e-34;                  // J s, exact
inline constexpr double atomic_mass_unit = 1.66053906660e-27;     // kg
inline constexpr double neon20_mass = 20.0 * atomic_mass_unit;    // kg
inline constexpr double standard_gravity = 9.81;                  // m/s^2

}  // namespace motirr::constants
