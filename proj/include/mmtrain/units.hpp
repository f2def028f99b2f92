#ifndef MMTRAIN_UNITS_HPP
#define MMTRAIN_UNITS_HPP

#include <cmath>
#include <numbers>

// Internal arithmetic is linear SI (W, Hz, m). Decibel forms only appear at
// configuration and reporting boundaries.
namespace mmtrain::units {

inline constexpr double speed_of_light = 299'792'458.0;

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

inline double dbm_to_watts(double dbm) { return from_db(dbm - 30.0); }
inline double watts_to_dbm(double watts) { return to_db(watts) + 30.0; }

/// dBm/Hz -> W/Hz.
inline double dbm_per_hz_to_watts_per_hz(double dbm_per_hz) { return dbm_to_watts(dbm_per_hz); }
/// dBm/MHz -> W/Hz.
inline double dbm_per_mhz_to_watts_per_hz(double dbm_per_mhz) { return dbm_to_watts(dbm_per_mhz) / 1e6; }

inline double wavelength(double carrier_hz) { return speed_of_light / carrier_hz; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace mmtrain::units

#endif  // MMTRAIN_UNITS_HPP
