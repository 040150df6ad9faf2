#pragma once

#include <numbers>

namespace disperse::constants {

// CODATA 2018, 10 significant digits. h, k_B and e are exact by definition.
inline constexpr double planck = 6.626070150e-34;           // J s
inline constexpr double hbar = 1.054571818e-34;             // J s
inline constexpr double boltzmann = 1.380649000e-23;        // J/K
inline constexpr double vacuum_permittivity = 8.854187813e-12; // F/m
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double electron_mass = 9.109383702e-31;       // kg
inline constexpr double proton_mass = 1.672621924e-27;         // kg
inline constexpr double atomic_mass_unit = 1.660539067e-27;    // kg

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;

}  // namespace disperse::constants
