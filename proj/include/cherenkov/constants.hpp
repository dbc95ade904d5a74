#pragma once

#include <complex>
#include <numbers>

namespace cherenkov {

using Complex = std::complex<double>;

// CODATA 2018 values, SI units.
namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double c = 299792458.0;                  // m/s
inline constexpr double epsilon_0 = 8.8541878128e-12;     // F/m
inline constexpr double mu_0 = 1.25663706212e-6;          // N/A^2
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double k_B = 1.380649e-23;               // J/K
inline constexpr double e = 1.602176634e-19;              // C
inline constexpr double m_e = 9.1093837015e-31;           // kg
inline constexpr double eV = 1.602176634e-19;             // J
inline constexpr double MeV = 1.0e6 * eV;                 // J
}  // namespace constants

}  // namespace cherenkov
