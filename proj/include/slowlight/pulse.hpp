#pragma once

// Pulse envelopes on uniform grids and their linear propagation through a
// vapor cell.  Envelopes are baseband: the field is E(t) exp(-i omega_c t)
// and the vapor is evaluated at omega_c + omega for each baseband bin.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "slowlight/errors.hpp"
#include "slowlight/fft.hpp"
#include "slowlight/format.hpp"
#include "slowlight/units.hpp"
#include "slowlight/vapor_model.hpp"

namespace slowlight {

/// Intensity FWHM of sinc^2(pi x) in units of 1/bandwidth.
inline constexpr double kSincFwhmConstant = 0.885892941378904;
/// Spectral-intensity FWHM times intensity FWHM for a transform-limited Gaussian.
inline constexpr double kGaussianTimeBandwidth = 2.0 * std::numbers::ln2 / std::numbers::pi;

class SampledGrid {
 public:
  SampledGrid(std::size_t samples, double time_step) : size_(samples), time_step_(time_step) {
    if (samples < 4 || !std::has_single_bit(samples)) {
      throw ContractError("grid size must be a power of two >= 4, got " +
                          std::to_string(samples));
    }
    if (!(time_step > 0.0)) throw ContractError("grid time step must be positive");
  }

  std::size_t size() const { return size_; }
  double time_step() const { return time_step_; }
  double duration() const { return static_cast<double>(size_) * time_step_; }
  double angular_step() const { return kTwoPi / duration(); }
  /// Full frequency span 1/dt, Hz.
  double frequency_span() const { return 1.0 / time_step_; }
  std::size_t center_index() const { return size_ / 2; }

  double time(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(size_ / 2)) * time_step_;
  }
  double omega(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(size_ / 2)) * angular_step();
  }

  friend bool operator==(const SampledGrid&, const SampledGrid&) = default;

 private:
  std::size_t size_;
  double time_step_;
};

enum class PulseShape { gaussian, sinc };

inline std::string to_string(PulseShape shape) {
  return shape == PulseShape::gaussian ? "gaussian" : "sinc";
}

inline PulseShape parse_pulse_shape(const std::string& name) {
  if (name == "gaussian") return PulseShape::gaussian;
  if (name == "sinc" || name == "rectangular") return PulseShape::sinc;
  throw ConfigError("unknown pulse shape '" + name + "' (expected gaussian or sinc)");
}

/// What to launch: shape, intensity FWHM and carrier.
struct PulseRecipe {
  PulseShape shape = PulseShape::sinc;
  double t0 = 250e-15;  ///< intensity FWHM, s
  double carrier = nm_to_omega(788.4);

  /// Rectangular (sinc) or spectral-intensity FWHM (Gaussian) bandwidth, Hz.
  double bandwidth() const {
    return shape == PulseShape::sinc ? kSincFwhmConstant / t0 : kGaussianTimeBandwidth / t0;
  }
};

/// Recipe for a sinc pulse with a given rectangular bandwidth in Hz.
inline PulseRecipe sinc_with_bandwidth(double bandwidth_hz, double carrier) {
  return {PulseShape::sinc, kSincFwhmConstant / bandwidth_hz, carrier};
}

/// Grid sizing rules.  Frequency span >= bandwidth_factor x bandwidth and
/// time span >= duration_factor x (T0 + expected delay) are hard limits;
/// the rest pick a comfortable default inside them.
struct GridPolicy {
  double bandwidth_factor = 8.0;
  double duration_factor = 16.0;
  double samples_per_fwhm = 16.0;
  /// Minimum passband bins for sinc pulses.  The periodic sinc falls off as
  /// 1/bins, so this keeps its window edge below the wraparound guard.
  double sinc_passband_bins = 2048.0;
  double wraparound_tolerance = 1e-3;
  /// Cap for automatic window doubling when a policy-sized grid wraps.
  std::size_t max_samples = std::size_t(1) << 22;
};

inline void validate_grid(const SampledGrid& grid, const PulseRecipe& recipe,
                          double expected_delay, const GridPolicy& policy = {}) {
  if (grid.frequency_span() < policy.bandwidth_factor * recipe.bandwidth() * (1.0 - 1e-12)) {
    throw ContractError("grid frequency span " + format_number(grid.frequency_span()) +
                        " Hz is below " + format_number(policy.bandwidth_factor) +
                        "x the pulse bandwidth");
  }
  const double needed = policy.duration_factor * (recipe.t0 + std::abs(expected_delay));
  if (grid.duration() < needed * (1.0 - 1e-12)) {
    throw ContractError("grid time span " + format_number(grid.duration()) + " s is below " +
                        format_number(policy.duration_factor) +
                        "x (T0 + expected delay) = " + format_number(needed) + " s");
  }
}

/// Smallest power-of-two grid that satisfies the policy for this pulse.
inline SampledGrid grid_for(const PulseRecipe& recipe, double expected_delay,
                            const GridPolicy& policy = {}) {
  const double bandwidth = recipe.bandwidth();
  const double dt = std::min(recipe.t0 / policy.samples_per_fwhm,
                             1.0 / (policy.bandwidth_factor * bandwidth));
  double span = policy.duration_factor * (recipe.t0 + std::abs(expected_delay));
  if (recipe.shape == PulseShape::sinc) {
    span = std::max(span, policy.sinc_passband_bins / bandwidth);
  }
  const auto needed = static_cast<std::size_t>(std::ceil(span / dt));
  SampledGrid grid(std::bit_ceil(std::max<std::size_t>(needed, 4)), dt);
  validate_grid(grid, recipe, expected_delay, policy);
  return grid;
}

struct PulseEnvelope {
  SampledGrid grid;
  double carrier = 0.0;  ///< rad/s
  std::vector<complex> samples;

  double energy() const {
    double sum = 0.0;
    for (const auto& v : samples) sum += std::norm(v);
    return sum * grid.time_step();
  }

  std::vector<double> intensity() const {
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(),
                   [](const complex& v) { return std::norm(v); });
    return out;
  }
};

/// Largest |E| in the outer 1/32 of the window on either side, relative to the peak.
inline double edge_ratio(std::span<const complex> samples) {
  double peak = 0.0;
  for (const auto& v : samples) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  const std::size_t band = std::max<std::size_t>(1, samples.size() / 32);
  double edge = 0.0;
  for (std::size_t i = 0; i < band; ++i) {
    edge = std::max({edge, std::abs(samples[i]), std::abs(samples[samples.size() - 1 - i])});
  }
  return edge / peak;
}

/// Gaussian with |E|^2 FWHM exactly T0 and unit peak, centred at t = 0.
inline PulseEnvelope make_gaussian(double t0, double carrier, const SampledGrid& grid) {
  if (!(t0 > 0.0)) throw ContractError("pulse FWHM must be positive");
  PulseEnvelope pulse{grid, carrier, std::vector<complex>(grid.size())};
  const double k = 2.0 * std::numbers::ln2 / (t0 * t0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    pulse.samples[i] = std::exp(-k * t * t);
  }
  if (edge_ratio(pulse.samples) >= 1e-6) {
    throw ContractError("time window too short for a " + format_number(t0) +
                        " s Gaussian: edge amplitude above 1e-6 of peak");
  }
  return pulse;
}

/// Rectangular field spectrum of full width 0.8859/T0 Hz centred on the carrier.
/// The time envelope is the band-limited (periodic) sinc with unit peak at t = 0.
inline PulseEnvelope make_sinc(double t0, double carrier, const SampledGrid& grid,
                               double edge_tolerance = GridPolicy{}.wraparound_tolerance) {
  if (!(t0 > 0.0)) throw ContractError("pulse FWHM must be positive");
  const double half_width = 0.5 * kTwoPi * kSincFwhmConstant / t0;  // rad/s
  std::vector<complex> spectrum(grid.size());
  std::size_t bins = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::abs(grid.omega(k)) <= half_width) {
      spectrum[k] = 1.0;
      ++bins;
    }
  }
  if (bins < 3) {
    throw ContractError("grid too coarse in frequency: sinc passband covers fewer than 3 bins");
  }
  if (bins == grid.size()) {
    throw ContractError("grid frequency span does not exceed the sinc passband");
  }
  PulseEnvelope pulse{grid, carrier, detail::to_time(spectrum)};
  const complex peak = pulse.samples[grid.center_index()];
  for (auto& v : pulse.samples) v /= peak;
  if (edge_ratio(pulse.samples) >= edge_tolerance) {
    throw ContractError("time window too short for a " + format_number(t0) +
                        " s sinc pulse: edge amplitude " +
                        format_number(edge_ratio(pulse.samples)) + " of peak");
  }
  return pulse;
}

inline PulseEnvelope make_pulse(const PulseRecipe& recipe, const SampledGrid& grid) {
  return recipe.shape == PulseShape::gaussian ? make_gaussian(recipe.t0, recipe.carrier, grid)
                                              : make_sinc(recipe.t0, recipe.carrier, grid);
}

/// Centered spectrum of an envelope (see fft.hpp for the convention).
inline std::vector<complex> spectrum_of(const PulseEnvelope& pulse) {
  return detail::to_spectrum(pulse.samples);
}

/// Closed frequency interval of baseband angular frequencies, rad/s.
struct FrequencyBand {
  double low = 0.0;
  double high = 0.0;
  double width() const { return high - low; }
  bool contains(double omega) const { return omega >= low && omega <= high; }
};

/// Contiguous band around the spectral peak where spectral intensity >= fraction x peak.
inline FrequencyBand spectral_band(const PulseEnvelope& pulse, double fraction = 0.5) {
  const auto spectrum = spectrum_of(pulse);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (std::norm(spectrum[k]) > std::norm(spectrum[peak])) peak = k;
  }
  const double level = fraction * std::norm(spectrum[peak]);
  std::size_t lo = peak;
  std::size_t hi = peak;
  while (lo > 0 && std::norm(spectrum[lo - 1]) >= level) --lo;
  while (hi + 1 < spectrum.size() && std::norm(spectrum[hi + 1]) >= level) ++hi;
  return {pulse.grid.omega(lo), pulse.grid.omega(hi)};
}

struct TransferFunction {
  SampledGrid grid;
  double carrier = 0.0;
  bool vacuum_referenced = true;
  std::vector<complex> samples;
};

/// H(omega) = exp(i n(omega) omega L / c) on the grid's absolute frequencies.
/// Vacuum-referenced functions drop the exp(i omega L/c) factor so an empty
/// cell gives H = 1.  The n = 1 + chi/2 validity guard is enforced inside
/// `guard_band` (baseband, rad/s); outside it the pulse carries no energy and
/// the grid is allowed to cross line cores.
inline TransferFunction transfer_function(const VaporCell& cell, const SampledGrid& grid,
                                          double carrier, bool vacuum_referenced = true,
                                          std::optional<FrequencyBand> guard_band = {}) {
  validate(cell);
  if (!(carrier + grid.omega(0) > 0.0)) {
    throw ContractError("grid reaches non-positive absolute frequencies");
  }
  const double density = number_density(cell);
  const double length = cell.interaction_length();
  TransferFunction tf{grid, carrier, vacuum_referenced, std::vector<complex>(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double omega = carrier + grid.omega(k);
    const complex chi = susceptibility(cell.catalog, density, omega);
    if (guard_band && guard_band->contains(grid.omega(k)) &&
        std::abs(chi) >= kMaxLinearizedChi) {
      throw ModelValidityError("|chi| = " + format_number(std::abs(chi)) + " at " +
                               format_number(omega_to_nm(omega)) +
                               " nm inside the pulse band breaks n = 1 + chi/2");
    }
    const complex excess_phase = 0.5 * chi * omega * length / kSpeedOfLight;
    complex h = std::exp(complex(0.0, 1.0) * excess_phase);
    if (!vacuum_referenced) {
      h *= std::polar(1.0, omega * length / kSpeedOfLight);
    }
    tf.samples[k] = h;
  }
  return tf;
}

/// Frequency-domain filtering of an envelope.  Throws WraparoundError when
/// the output reaches the window edge above `edge_tolerance` of its peak.
inline PulseEnvelope propagate(const PulseEnvelope& pulse, const TransferFunction& tf,
                               double edge_tolerance = GridPolicy{}.wraparound_tolerance) {
  if (!(pulse.grid == tf.grid)) {
    throw ContractError("pulse and transfer function are sampled on different grids");
  }
  if (pulse.carrier != tf.carrier) {
    throw ContractError("pulse and transfer function have different carriers");
  }
  auto spectrum = spectrum_of(pulse);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= tf.samples[k];
  PulseEnvelope out{pulse.grid, pulse.carrier, detail::to_time(spectrum)};
  if (const double edge = edge_ratio(out.samples); edge > edge_tolerance) {
    throw WraparoundError("propagated pulse reaches the window edge (" + format_number(edge) +
                          " of peak); enlarge the time window (more samples or a longer span)");
  }
  return out;
}

/// Unwrap a phase sequence so consecutive samples differ by less than pi.
inline std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double step = wrapped[i] - wrapped[i - 1];
    if (step > std::numbers::pi) {
      offset -= kTwoPi * std::round(step / kTwoPi);
    } else if (step < -std::numbers::pi) {
      offset += kTwoPi * std::round(-step / kTwoPi);
    }
    out[i] = wrapped[i] + offset;
  }
  return out;
}

inline std::vector<double> unwrapped_phase(std::span<const complex> values) {
  std::vector<double> wrapped(values.size());
  std::transform(values.begin(), values.end(), wrapped.begin(),
                 [](const complex& v) { return std::arg(v); });
  return unwrap_phase(wrapped);
}

// --- text I/O ---------------------------------------------------------------

/// Three columns: time (s), Re E, Im E.
inline void write_envelope(std::ostream& out, const PulseEnvelope& pulse) {
  out << "# carrier_rad_per_s=" << format_number(pulse.carrier) << "\n";
  out << "# time_step_s=" << format_number(pulse.grid.time_step()) << "\n";
  out << "t_s,re,im\n";
  for (std::size_t i = 0; i < pulse.samples.size(); ++i) {
    out << format_number(pulse.grid.time(i)) << ',' << format_number(pulse.samples[i].real())
        << ',' << format_number(pulse.samples[i].imag()) << '\n';
  }
}

/// Reads what write_envelope produces.  The time axis must be uniform with a
/// power-of-two length and t = 0 at index n/2.
inline PulseEnvelope read_envelope(std::istream& in) {
  std::vector<double> times;
  std::vector<complex> values;
  std::optional<double> carrier;
  std::optional<double> time_step;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# carrier_rad_per_s=";
      const std::string step_key = "# time_step_s=";
      if (line.rfind(key, 0) == 0) carrier = std::stod(line.substr(key.size()));
      if (line.rfind(step_key, 0) == 0) time_step = std::stod(line.substr(step_key.size()));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.find_first_of("0123456789") == std::string::npos || line.front() == 't') continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw ConfigError("envelope row needs three comma-separated columns: '" + line + "'");
    }
    times.push_back(std::stod(line.substr(0, c1)));
    values.emplace_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::stod(line.substr(c2 + 1)));
  }
  if (!carrier) throw ConfigError("envelope file lacks the carrier comment line");
  if (times.size() < 4) throw ConfigError("envelope file has fewer than 4 samples");
  const double dt = time_step.value_or(times[1] - times[0]);
  SampledGrid grid(times.size(), dt);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - grid.time(i)) > 1e-6 * dt) {
      throw ConfigError("envelope time axis is not the centered uniform grid");
    }
  }
  return {grid, *carrier, std::move(values)};
}

/// Table of (wavelength nm, |H|, unwrapped phase rad) in ascending wavelength.
inline void write_transfer_function(std::ostream& out, const TransferFunction& tf) {
  const auto phase = unwrapped_phase(tf.samples);
  out << "# vacuum_referenced=" << (tf.vacuum_referenced ? "true" : "false") << "\n";
  out << "wavelength_nm,magnitude,phase_rad\n";
  for (std::size_t i = tf.samples.size(); i-- > 0;) {
    out << format_number(omega_to_nm(tf.carrier + tf.grid.omega(i))) << ','
        << format_number(std::abs(tf.samples[i])) << ',' << format_number(phase[i]) << '\n';
  }
}

}  // namespace slowlight
