#pragma once

#include <numbers>

namespace gnsstune {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kStandardGravity = 9.80665;         // m/s^2

// WGS-84
inline constexpr double kEarthMu = 3.986004418e14;          // m^3/s^2
inline constexpr double kEarthRadius = 6378137.0;           // m, equatorial
inline constexpr double kEarthFlattening = 1.0 / 298.257223563;
inline constexpr double kEarthJ2 = 1.08263e-3;
inline constexpr double kEarthRotationRate = 7.2921150e-5;  // rad/s

// GPS L1 C/A
inline constexpr double kL1Frequency = 1575.42e6;           // Hz
inline constexpr double kL1Wavelength = kSpeedOfLight / kL1Frequency;
inline constexpr double kCaChipRate = 1.023e6;              // chips/s
inline constexpr int kCaCodeLength = 1023;
inline constexpr double kChipLength = kSpeedOfLight / kCaChipRate;  // m/chip
inline constexpr double kCarrierToCodeRatio = kL1Frequency / kCaChipRate;  // 1540
inline constexpr double kDataBitPeriod = 0.020;             // s, 50 bps

}  // namespace gnsstune
