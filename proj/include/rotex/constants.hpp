#pragma once

#include <numbers>

namespace rotex::phys {

inline constexpr double c_cm = 2.99792458e10;   // cm/s
inline constexpr double c_si = 2.99792458e8;    // m/s
inline constexpr double h = 6.62607015e-34;     // J s
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double k_B = 1.380649e-23;     // J/K
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double pi = std::numbers::pi;

inline constexpr double ps = 1e-12;
inline constexpr double fs = 1e-15;

}  // namespace rotex::phys
