#pragma once

#include <numbers>

namespace slowlight {

inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kPascalPerTorr = 133.322368421;   // Pa/torr
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kZeroCelsius = 273.15;

struct Celsius;

/// Absolute temperature. Public interfaces take Celsius; physics runs on Kelvin.
struct Kelvin {
  double value = 0.0;
  constexpr explicit Kelvin(double v) : value(v) {}
  constexpr Kelvin(Celsius c);
};

struct Celsius {
  double value = 0.0;
  constexpr explicit Celsius(double v) : value(v) {}
  constexpr Celsius(Kelvin k) : value(k.value - kZeroCelsius) {}
};

constexpr Kelvin::Kelvin(Celsius c) : value(c.value + kZeroCelsius) {}

/// Vacuum wavelength (m) to angular frequency (rad/s), and back.
constexpr double angular_frequency_from_wavelength(double wavelength_m) {
  return kTwoPi * kSpeedOfLight / wavelength_m;
}

constexpr double wavelength_from_angular_frequency(double omega) {
  return kTwoPi * kSpeedOfLight / omega;
}

constexpr double nm_to_omega(double nm) { return angular_frequency_from_wavelength(nm * 1e-9); }
constexpr double omega_to_nm(double omega) { return wavelength_from_angular_frequency(omega) * 1e9; }

/// Frequency width (Hz) of a wavelength interval centred on `center_nm`.
constexpr double bandwidth_hz_from_nm(double width_nm, double center_nm) {
  return kSpeedOfLight * width_nm * 1e-9 / (center_nm * 1e-9 * center_nm * 1e-9);
}

constexpr double bandwidth_nm_from_hz(double width_hz, double center_nm) {
  return width_hz * (center_nm * 1e-9) * (center_nm * 1e-9) / kSpeedOfLight * 1e9;
}

}  // namespace slowlight
