#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "slowlight/errors.hpp"
#include "slowlight/pulse.hpp"

namespace slowlight {

/// Energy fraction of sinc^2 inside its main lobe, (2/pi) Si(2 pi).
inline constexpr double kSincMainLobeFraction = 0.9028233335802807;

struct IntensityFeatures {
  std::size_t peak_index = 0;
  double peak_time = 0.0;   ///< s, parabolic interpolation
  double peak_value = 0.0;  ///< |E|^2 at the interpolated peak
  double fwhm = 0.0;        ///< s, linear interpolation of the half-maximum crossings
};

/// Peak and FWHM of |E|^2.  The FWHM belongs to the lobe containing the peak.
inline IntensityFeatures measure_intensity(const PulseEnvelope& pulse) {
  const auto intensity = pulse.intensity();
  const std::size_t n = intensity.size();
  const auto k = static_cast<std::size_t>(
      std::distance(intensity.begin(), std::max_element(intensity.begin(), intensity.end())));
  const double dt = pulse.grid.time_step();
  IntensityFeatures f;
  f.peak_index = k;
  f.peak_time = pulse.grid.time(k);
  f.peak_value = intensity[k];
  if (!(intensity[k] > 0.0)) throw MetricUndefinedError("pulse has zero intensity");
  if (k > 0 && k + 1 < n) {
    const double y0 = intensity[k - 1];
    const double y1 = intensity[k];
    const double y2 = intensity[k + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    if (curvature < 0.0) {
      const double shift = 0.5 * (y0 - y2) / curvature;
      f.peak_time += shift * dt;
      f.peak_value = y1 - 0.25 * (y0 - y2) * shift;
    }
  }
  const double half = 0.5 * f.peak_value;
  std::size_t left = k;
  while (left > 0 && intensity[left] > half) --left;
  std::size_t right = k;
  while (right + 1 < n && intensity[right] > half) ++right;
  if (intensity[left] > half || intensity[right] > half) {
    throw MetricUndefinedError("intensity does not fall to half maximum inside the window");
  }
  const double t_left = pulse.grid.time(left) + (half - intensity[left]) /
                                                    (intensity[left + 1] - intensity[left]) * dt;
  const double t_right = pulse.grid.time(right - 1) +
                         (half - intensity[right - 1]) /
                             (intensity[right] - intensity[right - 1]) * dt;
  f.fwhm = t_right - t_left;
  return f;
}

/// Output peak time minus input peak time (vacuum-referenced envelopes).
inline double peak_delay(const PulseEnvelope& input, const PulseEnvelope& output) {
  return measure_intensity(output).peak_time - measure_intensity(input).peak_time;
}

inline double fractional_delay(const PulseEnvelope& input, const PulseEnvelope& output) {
  return peak_delay(input, output) / measure_intensity(input).fwhm;
}

inline double fractional_broadening(const PulseEnvelope& input, const PulseEnvelope& output) {
  const double t0 = measure_intensity(input).fwhm;
  return (measure_intensity(output).fwhm - t0) / t0;
}

struct Distortion {
  double amplitude = 0.0;  ///< D_a
  double phase = 0.0;      ///< D_p
};

/// Amplitude and phase distortion of a transfer function over a band.
///
/// D_a: RMS deviation of |H| from its band average, divided by that average.
/// D_p: RMS residual of the unwrapped phase about its least-squares line, over 2 pi.
/// Both vanish for H0 exp(i omega t_p) and ignore global scale and linear phase.
inline Distortion distortion(const TransferFunction& tf, const FrequencyBand& band) {
  const auto& grid = tf.grid;
  if (band.low < grid.omega(0) || band.high > grid.omega(grid.size() - 1) ||
      !(band.high > band.low)) {
    throw ContractError("distortion band must be a non-empty interval inside the grid");
  }
  std::vector<double> omega;
  std::vector<complex> values;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (band.contains(grid.omega(k))) {
      omega.push_back(grid.omega(k));
      values.push_back(tf.samples[k]);
    }
  }
  if (values.size() < 3) throw ContractError("distortion band covers fewer than 3 grid bins");
  const auto m = static_cast<double>(values.size());

  double mean_mag = 0.0;
  for (const auto& v : values) mean_mag += std::abs(v);
  mean_mag /= m;
  if (!(mean_mag > 0.0)) throw MetricUndefinedError("transfer function vanishes over the band");
  double mag_var = 0.0;
  for (const auto& v : values) mag_var += std::pow(std::abs(v) - mean_mag, 2);

  const auto phase = unwrapped_phase(values);
  const double w_mean = std::accumulate(omega.begin(), omega.end(), 0.0) / m;
  const double p_mean = std::accumulate(phase.begin(), phase.end(), 0.0) / m;
  double sww = 0.0;
  double swp = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    sww += (omega[i] - w_mean) * (omega[i] - w_mean);
    swp += (omega[i] - w_mean) * (phase[i] - p_mean);
  }
  const double slope = swp / sww;
  double residual = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    residual += std::pow(phase[i] - p_mean - slope * (omega[i] - w_mean), 2);
  }
  return {std::sqrt(mag_var / m) / mean_mag, std::sqrt(residual / m) / kTwoPi};
}

struct LeakageOptions {
  /// For pulses without intensity minima around the peak, use the symmetric
  /// window holding the sinc main-lobe energy fraction.
  bool energy_fallback = true;
};

/// Channel window taken from the input pulse: [first, first + width).
/// Fallback windows grow two samples at a time; `weight` places the target
/// energy fraction between width - 2 (weight 0) and width (weight 1).
struct ChannelWindow {
  std::size_t first = 0;
  std::size_t width = 0;
  bool from_minima = true;
  double weight = 1.0;
};

inline ChannelWindow channel_window(std::span<const double> intensity,
                                    const LeakageOptions& options = {}) {
  const std::size_t n = intensity.size();
  const auto k = static_cast<std::size_t>(
      std::distance(intensity.begin(), std::max_element(intensity.begin(), intensity.end())));
  std::size_t left = k;
  while (left > 0 && intensity[left - 1] < intensity[left]) --left;
  std::size_t right = k;
  while (right + 1 < n && intensity[right + 1] < intensity[right]) ++right;
  const bool left_min = left > 0 && intensity[left - 1] > intensity[left];
  const bool right_min = right + 1 < n && intensity[right + 1] > intensity[right];
  if (left_min && right_min) return {left, right - left + 1, true};
  if (!options.energy_fallback) {
    throw MetricUndefinedError("input pulse has no intensity minima around its peak");
  }
  const double total = std::accumulate(intensity.begin(), intensity.end(), 0.0);
  const double target = kSincMainLobeFraction * total;
  double inside = intensity[k];
  double previous = inside;
  std::size_t lo = k;
  std::size_t hi = k;
  while (inside < target && (lo > 0 || hi + 1 < n)) {
    previous = inside;
    if (lo > 0) inside += intensity[--lo];
    if (hi + 1 < n) inside += intensity[++hi];
  }
  const double weight =
      (hi > lo + 1 && inside > previous) ? std::clamp((target - previous) / (inside - previous), 0.0, 1.0)
                                         : 1.0;
  return {lo, hi - lo + 1, false, weight};
}

/// Largest energy fraction a window of `width` samples can capture, by
/// exhaustive scan over offsets.
inline double max_window_fraction(std::span<const double> intensity, std::size_t width) {
  const std::size_t n = intensity.size();
  if (width == 0 || width > n) throw ContractError("leakage window width out of range");
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + intensity[i];
  if (!(prefix[n] > 0.0)) throw MetricUndefinedError("pulse has zero energy");
  double best = 0.0;
  for (std::size_t a = 0; a + width <= n; ++a) best = std::max(best, prefix[a + width] - prefix[a]);
  return best / prefix[n];
}

/// Fraction of output energy outside the best-placed channel window.
inline double power_leakage(const PulseEnvelope& input, const PulseEnvelope& output,
                            const LeakageOptions& options = {}) {
  if (!(input.grid == output.grid)) throw ContractError("input and output grids differ");
  const auto window = channel_window(input.intensity(), options);
  const auto intensity = output.intensity();
  double captured = max_window_fraction(intensity, window.width);
  if (window.weight < 1.0) {
    captured = window.weight * captured +
               (1.0 - window.weight) * max_window_fraction(intensity, window.width - 2);
  }
  return std::clamp(1.0 - captured, 0.0, 1.0);
}

struct PropagationReport {
  double t0 = 0.0;            ///< input intensity FWHM, s
  double output_fwhm = 0.0;   ///< s
  double delay = 0.0;         ///< peak delay t_D, s
  double fractional_delay = 0.0;
  double fractional_broadening = 0.0;
  double amplitude_distortion = 0.0;
  double phase_distortion = 0.0;
  double leakage = 0.0;
  double absorbed = 0.0;      ///< 1 - E_out/E_in
  double group_delay = 0.0;   ///< vapor-model delay at the carrier, s
  PulseEnvelope input;
  PulseEnvelope output;
};

/// Metrics for a propagated pulse.  D_a and D_p use the input's half-maximum
/// spectral band.
inline PropagationReport make_report(const PulseEnvelope& input, const PulseEnvelope& output,
                                     const TransferFunction& tf, double group_delay = 0.0,
                                     const LeakageOptions& options = {}) {
  const auto in = measure_intensity(input);
  const auto out = measure_intensity(output);
  const auto d = distortion(tf, spectral_band(input, 0.5));
  PropagationReport r{in.fwhm,
                      out.fwhm,
                      out.peak_time - in.peak_time,
                      (out.peak_time - in.peak_time) / in.fwhm,
                      (out.fwhm - in.fwhm) / in.fwhm,
                      d.amplitude,
                      d.phase,
                      power_leakage(input, output, options),
                      std::clamp(1.0 - output.energy() / input.energy(), 0.0, 1.0),
                      group_delay,
                      input,
                      output};
  return r;
}

inline nlohmann::json to_json(const PropagationReport& r) {
  return {{"t0_s", r.t0},
          {"output_fwhm_s", r.output_fwhm},
          {"delay_s", r.delay},
          {"fractional_delay", r.fractional_delay},
          {"fractional_broadening", r.fractional_broadening},
          {"amplitude_distortion", r.amplitude_distortion},
          {"phase_distortion", r.phase_distortion},
          {"leakage", r.leakage},
          {"absorbed", r.absorbed},
          {"group_delay_s", r.group_delay},
          {"carrier_rad_per_s", r.input.carrier},
          {"grid_samples", r.input.grid.size()},
          {"grid_time_step_s", r.input.grid.time_step()}};
}

}  // namespace slowlight
