#pragma once

#include <cmath>
#include <numbers>

namespace rydsat {

namespace constants {
// CODATA 2018 exact / recommended values.
inline constexpr double planck = 6.62607015e-34;                    // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);   // J s
inline constexpr double elementary_charge = 1.602176634e-19;        // C
inline constexpr double bohr_radius = 5.29177210903e-11;            // m
inline constexpr double speed_of_light = 299792458.0;               // m/s
inline constexpr double boltzmann = 1.380649e-23;                   // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;       // kg
inline constexpr double cesium133_mass = 132.905451961 * atomic_mass_unit;
}  // namespace constants

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hz_to_rad_s(double hz) { return two_pi * hz; }
inline constexpr double rad_s_to_hz(double w) { return w / two_pi; }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Dipole moment given in units of e*a0, returned in C*m.
inline constexpr double dipole_from_ea0(double ea0) {
  return ea0 * constants::elementary_charge * constants::bohr_radius;
}

/// 1 V/m = 1e7 nV/cm.
inline constexpr double v_per_m_to_nv_per_cm(double v) { return v * 1e7; }
inline constexpr double nv_per_cm_to_v_per_m(double nv) { return nv * 1e-7; }

}  // namespace rydsat
