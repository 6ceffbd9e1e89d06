#pragma once

#include <string>

// Atomic units internally, SI/Hz at the edges.
namespace rydmed::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hartree_hz = 6.579683920502e15;  // E_h / h
inline constexpr double bohr_m = 5.29177210903e-11;
inline constexpr double debye_au = 0.3934303;
inline constexpr double planck = 6.62607015e-34;
inline constexpr double hbar = planck / (2.0 * pi);
inline constexpr double amu_kg = 1.66053906660e-27;
inline constexpr double inv_cm_hz = 29.9792458e9;

inline double au_to_hz(double e) { return e * hartree_hz; }
inline double hz_to_au(double f) { return f / hartree_hz; }
inline double m_to_au(double x) { return x / bohr_m; }
inline double au_to_m(double x) { return x * bohr_m; }

// Recoil energy hbar^2 (pi/L)^2 / 2M, as a frequency.
double recoil_hz(double period_m, double mass_kg);

// Unit-string conversions used by the config layer. Throw on unknown units.
double length_to_m(double v, const std::string& unit);
double frequency_to_hz(double v, const std::string& unit);
double mass_to_kg(double v, const std::string& unit);
double dipole_to_au(double v, const std::string& unit);

}  // namespace rydmed::units
