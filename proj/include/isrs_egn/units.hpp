#pragma once

// Physical constants and unit conversions. Internal canon: Hz, W, km,
// s^n/km, and the Raman gain slope per Hz.

#include <cmath>
#include <numbers>

namespace isrs_egn::units {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

/// 10*log10(e), the dB-per-neper factor for power.
inline const double kDbPerNeper = 10.0 * std::log10(std::numbers::e);

inline double db_per_km_to_per_km(double db_per_km) { return db_per_km / kDbPerNeper; }
inline double per_km_to_db_per_km(double per_km) { return per_km * kDbPerNeper; }

inline double dbm_to_w(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double w_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline constexpr double kGHz = 1e9;
inline constexpr double kTHz = 1e12;

// 1 ps^2/km = 1e-24 s^2/km, 1 ps^3/km = 1e-36 s^3/km
inline constexpr double kPs2 = 1e-24;
inline constexpr double kPs3 = 1e-36;

/// Raman gain slope: 1/(W km THz) -> 1/(W km Hz).
inline constexpr double cr_per_thz_to_per_hz(double cr_per_w_km_thz) { return cr_per_w_km_thz * 1e-12; }

}  // namespace isrs_egn::units
