#pragma once

// Linear optical response of a heated alkali vapor modelled as a sum of
// Lorentzian lines.
//
// Conventions: fields evolve as exp(-i omega t), so a passive medium has
// Im chi >= 0 and Im n >= 0.  Each line contributes
//
//   chi_j(omega) = -N s_j / (omega - omega_j + i gamma_j)
//
// which gives normal dispersion (Re chi > 0) on the red side of a line.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "slowlight/errors.hpp"
#include "slowlight/units.hpp"

namespace slowlight {

using complex = std::complex<double>;

struct SpectralLine {
  std::string name;
  double strength = 0.0;   ///< m^3 rad/s
  double center = 0.0;     ///< angular frequency, rad/s
  double linewidth = 0.0;  ///< half width gamma, rad/s
};

struct LineCatalog {
  std::string label;
  std::vector<SpectralLine> lines;
};

/// log10(P / torr) = a + b/T + c*T + d*log10(T), T in kelvin.
struct VaporPressureBranch {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double log10_pressure_torr(double kelvin) const {
    return a + b / kelvin + c * kelvin + d * std::log10(kelvin);
  }
};

/// Vapor-pressure curve (solid below the melting point, liquid above) turned
/// into a number density through the ideal-gas law.
struct DensityModel {
  std::string name;
  VaporPressureBranch solid;
  VaporPressureBranch liquid;
  double melting_point = 312.45;  ///< K
  double min_temperature = 200.0;  ///< K, inclusive
  double max_temperature = 800.0;  ///< K, inclusive
};

struct VaporCell {
  LineCatalog catalog;
  DensityModel density;
  Kelvin temperature{Celsius{25.0}};
  double length = 0.07;  ///< single-pass length, m
  int passes = 1;
  /// Multiplies N(T). 0 gives an empty cell; calibration adjusts it.
  double density_scale = 1.0;

  double interaction_length() const { return length * passes; }
};

/// Two-line effective Rb catalog with the default (unscaled) density model.
/// Values mirror data/rb_two_line.json.
inline LineCatalog rubidium_two_line_catalog() {
  const double gamma = kTwoPi * 6e6;
  return LineCatalog{"Rb effective D1/D2",
                     {{"D1", 2.25e-13, nm_to_omega(794.978995), gamma},
                      {"D2", 4.58e-13, nm_to_omega(780.241328), gamma}}};
}

inline DensityModel rubidium_density_model() {
  DensityModel m;
  m.name = "Rb vapor pressure (solid/liquid), ideal gas";
  m.solid = {-94.04826, -1961.258, -0.03771687, 42.57526};
  m.liquid = {15.88253, -4529.635, 0.00058663, -2.99138};
  m.melting_point = 312.45;
  m.min_temperature = 200.0;
  m.max_temperature = 800.0;
  return m;
}

inline void validate(const SpectralLine& line) {
  if (!(line.strength > 0.0) || !(line.center > 0.0) || !(line.linewidth > 0.0)) {
    throw ConfigError("spectral line '" + line.name +
                      "': strength, center and linewidth must all be positive");
  }
}

inline void validate(const LineCatalog& catalog) {
  if (catalog.lines.empty()) {
    throw ConfigError("line catalog '" + catalog.label + "' has no lines");
  }
  for (std::size_t i = 0; i < catalog.lines.size(); ++i) {
    validate(catalog.lines[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (catalog.lines[i].center == catalog.lines[j].center) {
        throw ConfigError("line catalog '" + catalog.label + "': lines '" +
                          catalog.lines[j].name + "' and '" + catalog.lines[i].name +
                          "' share a center frequency");
      }
    }
  }
}

inline void validate(const VaporCell& cell) {
  validate(cell.catalog);
  if (!(cell.length > 0.0) || cell.passes < 1) {
    throw ConfigError("vapor cell: length must be > 0 and passes >= 1");
  }
  if (!(cell.density_scale >= 0.0)) {
    throw ConfigError("vapor cell: density scale must be >= 0");
  }
}

/// Saturated vapor pressure in pascal.
inline double vapor_pressure(const DensityModel& model, Kelvin temperature) {
  const double t = temperature.value;
  if (!(t >= model.min_temperature && t <= model.max_temperature)) {
    throw RangeError("temperature " + std::to_string(t) + " K outside density model '" +
                     model.name + "' validity range [" + std::to_string(model.min_temperature) +
                     ", " + std::to_string(model.max_temperature) + "] K");
  }
  const auto& branch = t < model.melting_point ? model.solid : model.liquid;
  return std::pow(10.0, branch.log10_pressure_torr(t)) * kPascalPerTorr;
}

/// Atoms per cubic metre, N = P(T) / (k_B T).
inline double number_density(const DensityModel& model, Kelvin temperature) {
  return vapor_pressure(model, temperature) / (kBoltzmann * temperature.value);
}

inline double number_density(const VaporCell& cell) {
  return cell.density_scale * number_density(cell.density, cell.temperature);
}

namespace detail {

/// Per-line sums of the Lorentzian and its real-part derivatives, all
/// without the -N prefactor.
struct LorentzSums {
  complex value{0.0, 0.0};  // sum s/(d + i g)
  double d1 = 0.0;          // d/domega of Re
  double d2 = 0.0;          // d^2/domega^2 of Re
};

inline LorentzSums lorentz_sums(const LineCatalog& catalog, double omega) {
  LorentzSums out;
  for (const auto& line : catalog.lines) {
    const double d = omega - line.center;
    const double g2 = line.linewidth * line.linewidth;
    const double q = d * d + g2;
    out.value += line.strength / complex(d, line.linewidth);
    // Re[s/(d+ig)] = s d/q ;  derivative s (g^2 - d^2)/q^2 ; second 2 s d (d^2 - 3 g^2)/q^3
    out.d1 += line.strength * (g2 - d * d) / (q * q);
    out.d2 += 2.0 * line.strength * d * (d * d - 3.0 * g2) / (q * q * q);
  }
  return out;
}

inline void require_positive_frequency(double omega) {
  if (!(omega > 0.0)) {
    throw ContractError("angular frequency must be positive");
  }
}

}  // namespace detail

/// Susceptibility for an explicit number density.
inline complex susceptibility(const LineCatalog& catalog, double density, double omega) {
  detail::require_positive_frequency(omega);
  return -density * detail::lorentz_sums(catalog, omega).value;
}

inline complex susceptibility(const VaporCell& cell, double omega) {
  return susceptibility(cell.catalog, number_density(cell), omega);
}

/// Largest |chi| for which n = 1 + chi/2 is accepted.
inline constexpr double kMaxLinearizedChi = 1e-2;

/// n = 1 + chi/2. Throws ModelValidityError when |chi| >= 1e-2.
inline complex refractive_index(const VaporCell& cell, double omega) {
  const complex chi = susceptibility(cell, omega);
  if (std::abs(chi) >= kMaxLinearizedChi) {
    throw ModelValidityError("|chi| = " + std::to_string(std::abs(chi)) + " at " +
                             std::to_string(omega_to_nm(omega)) +
                             " nm breaks the n = 1 + chi/2 approximation (limit 1e-2)");
  }
  return 1.0 + 0.5 * chi;
}

/// Intensity optical depth alpha L = 2 omega L n'' / c.
inline double optical_depth(const VaporCell& cell, double omega) {
  const double n_imag = 0.5 * susceptibility(cell, omega).imag();
  return 2.0 * omega * cell.interaction_length() * n_imag / kSpeedOfLight;
}

/// Beer's-law intensity transmission exp(-alpha L).
inline double transmission(const VaporCell& cell, double omega) {
  return std::exp(-optical_depth(cell, omega));
}

/// n_g = n' + omega dn'/domega with the closed-form Lorentzian derivative.
inline double group_index(const VaporCell& cell, double omega) {
  detail::require_positive_frequency(omega);
  const double density = number_density(cell);
  const auto sums = detail::lorentz_sums(cell.catalog, omega);
  const double n_real = 1.0 - 0.5 * density * sums.value.real();
  const double dn = -0.5 * density * sums.d1;
  return n_real + omega * dn;
}

/// Envelope delay relative to vacuum, t_D = L (n_g - 1)/c.
inline double group_delay(const VaporCell& cell, double omega) {
  return cell.interaction_length() * (group_index(cell, omega) - 1.0) / kSpeedOfLight;
}

/// Group velocity dispersion d(1/v_g)/domega in s^2/m.
inline double gvd(const VaporCell& cell, double omega) {
  detail::require_positive_frequency(omega);
  const double density = number_density(cell);
  const auto sums = detail::lorentz_sums(cell.catalog, omega);
  const double dn = -0.5 * density * sums.d1;
  const double d2n = -0.5 * density * sums.d2;
  return (2.0 * dn + omega * d2n) / kSpeedOfLight;
}

/// Zero of the GVD in [omega_lo, omega_hi] by bisection (relative tolerance 1e-12).
/// The sign of GVD does not depend on N, so the root is independent of temperature;
/// the bisection runs on the density-free dispersion to stay valid for empty cells.
inline double find_gvd_zero(const VaporCell& cell, double omega_lo, double omega_hi) {
  if (omega_lo > omega_hi) std::swap(omega_lo, omega_hi);
  detail::require_positive_frequency(omega_lo);
  const auto shape = [&](double omega) {
    const auto sums = detail::lorentz_sums(cell.catalog, omega);
    return -(2.0 * sums.d1 + omega * sums.d2);
  };
  double f_lo = shape(omega_lo);
  const double f_hi = shape(omega_hi);
  if (f_lo == 0.0) return omega_lo;
  if (f_hi == 0.0) return omega_hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw RootNotFoundError("GVD does not change sign between " +
                            std::to_string(omega_to_nm(omega_hi)) + " nm and " +
                            std::to_string(omega_to_nm(omega_lo)) + " nm");
  }
  while (omega_hi - omega_lo > 1e-12 * omega_hi) {
    const double mid = 0.5 * (omega_lo + omega_hi);
    const double f_mid = shape(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      omega_lo = mid;
      f_lo = f_mid;
    } else {
      omega_hi = mid;
    }
  }
  return 0.5 * (omega_lo + omega_hi);
}

/// Catalog split into a red and a blue group at the widest gap between line
/// centers (the fine-structure doublet for alkali catalogs).
struct Doublet {
  double red_edge = 0.0;       ///< highest center in the red group, rad/s
  double blue_edge = 0.0;      ///< lowest center in the blue group, rad/s
  double red_centroid = 0.0;   ///< strength-weighted center, rad/s
  double blue_centroid = 0.0;
  double red_linewidth = 0.0;  ///< of the line at the red edge
  double blue_linewidth = 0.0;
};

inline Doublet split_doublet(const LineCatalog& catalog) {
  if (catalog.lines.size() < 2) {
    throw ContractError("catalog '" + catalog.label + "' needs at least two lines");
  }
  auto lines = catalog.lines;
  std::sort(lines.begin(), lines.end(),
            [](const auto& a, const auto& b) { return a.center < b.center; });
  std::size_t split = 1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].center - lines[i - 1].center > lines[split].center - lines[split - 1].center) {
      split = i;
    }
  }
  const auto centroid = [&](std::size_t first, std::size_t last) {
    double weight = 0.0;
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) {
      weight += lines[i].strength;
      sum += lines[i].strength * lines[i].center;
    }
    return sum / weight;
  };
  return {lines[split - 1].center,         lines[split].center,
          centroid(0, split),              centroid(split, lines.size()),
          lines[split - 1].linewidth,      lines[split].linewidth};
}

/// Midpoint (in angular frequency) between the doublet's strength-weighted centers.
inline double doublet_midpoint(const LineCatalog& catalog) {
  const auto d = split_doublet(catalog);
  return 0.5 * (d.red_centroid + d.blue_centroid);
}

/// GVD zero between the two halves of the doublet, searched away from the line cores.
inline double find_gvd_zero_between_lines(const VaporCell& cell) {
  const auto d = split_doublet(cell.catalog);
  const double margin = 0.05 * (d.blue_edge - d.red_edge);
  return find_gvd_zero(cell, d.red_edge + margin, d.blue_edge - margin);
}

struct DensityCalibration {
  double scale = 1.0;
  double uncalibrated_delay = 0.0;  ///< s
  double target_delay = 0.0;        ///< s
};

/// Reference condition for the density calibration and the accepted scale range.
struct CalibrationTarget {
  double delay = 10e-12;         ///< s
  Celsius temperature{280.0};
  double length = 0.21;          ///< m, effective (all passes)
  double min_scale = 0.5;
  double max_scale = 2.0;
};

/// Scale factor on N(T) that makes the delay at the doublet midpoint equal the
/// target.  Group delay is linear in N, so one evaluation suffices.
inline DensityCalibration calibrate_density_scale(const LineCatalog& catalog,
                                                  const DensityModel& density,
                                                  const CalibrationTarget& target = {}) {
  VaporCell reference{catalog, density, Kelvin{target.temperature}, target.length, 1, 1.0};
  const double raw = group_delay(reference, doublet_midpoint(catalog));
  if (!(raw > 0.0)) {
    throw RangeError("calibration reference delay is not positive");
  }
  const double scale = target.delay / raw;
  if (scale < target.min_scale || scale > target.max_scale) {
    throw RangeError("density calibration factor " + std::to_string(scale) +
                     " outside accepted range [" + std::to_string(target.min_scale) + ", " +
                     std::to_string(target.max_scale) + "]; density model '" + density.name +
                     "' rejected");
  }
  return {scale, raw, target.delay};
}

/// Band around `center` where n_g - 1 stays within (1 + tolerance) of its value
/// at `center`.  Edges are located by bisection and limited to the open
/// interval between the neighbouring lines.
struct UniformBand {
  double omega_low = 0.0;
  double omega_high = 0.0;
  double width_nm() const { return omega_to_nm(omega_low) - omega_to_nm(omega_high); }
  double width_hz() const { return (omega_high - omega_low) / kTwoPi; }
};

inline UniformBand uniform_group_index_band(const VaporCell& cell, double center,
                                            double tolerance = 0.5) {
  const auto d = split_doublet(cell.catalog);
  if (!(center > d.red_edge && center < d.blue_edge)) {
    throw ContractError("uniform band center must lie between the two halves of the doublet");
  }
  const double ref = group_index(cell, center) - 1.0;
  if (!(ref > 0.0)) return {center, center};
  const double limit = (1.0 + tolerance) * ref;
  const auto excess = [&](double omega) { return group_index(cell, omega) - 1.0 - limit; };
  const auto edge = [&](double inside, double outside) {
    // outside is close to a line core where n_g diverges; walk in until excess > 0 there
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (inside + outside);
      if (excess(mid) > 0.0) {
        outside = mid;
      } else {
        inside = mid;
      }
      if (std::abs(outside - inside) < 1e-13 * center) break;
    }
    return 0.5 * (inside + outside);
  };
  return {edge(center, d.red_edge + 10.0 * d.red_linewidth),
          edge(center, d.blue_edge - 10.0 * d.blue_linewidth)};
}

}  // namespace slowlight
