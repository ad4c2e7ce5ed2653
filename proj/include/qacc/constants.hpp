#pragma once

#include <numbers>

namespace qacc::constants {

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * pi;

/// Reduced Planck constant [J s], CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;

/// Boltzmann constant [J/K], exact since the 2019 SI redefinition.
inline constexpr double boltzmann = 1.380649e-23;

/// Speed of light in vacuum [m/s], exact.
inline constexpr double light_speed = 2.99792458e8;

} // namespace qacc::constants
