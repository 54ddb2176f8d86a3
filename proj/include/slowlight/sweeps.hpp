#pragma once

// Parameter studies built on the vapor model and the propagation engine.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "slowlight/errors.hpp"
#include "slowlight/metrics.hpp"
#include "slowlight/simulation.hpp"
#include "slowlight/vapor_model.hpp"

namespace slowlight {

/// Apply `fn` to every item on up to `threads` workers; results keep input order.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn fn, unsigned threads = 0)
    -> std::vector<std::invoke_result_t<Fn, const T&>> {
  using R = std::invoke_result_t<Fn, const T&>;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, items.size())));
  std::vector<std::optional<R>> slots(items.size());
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < items.size(); i += threads) slots[i].emplace(fn(items[i]));
    }));
  }
  for (auto& f : workers) f.get();
  std::vector<R> out;
  out.reserve(items.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Inclusive arithmetic range lo, lo+step, ..., hi.
inline std::vector<double> inclusive_range(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (!(hi >= lo)) throw ConfigError("sweep range is empty (max < min)");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

// --- delay vs wavelength ------------------------------------------------------

struct SpectrumRow {
  double wavelength_nm = 0.0;
  double group_delay = 0.0;  ///< s
  double group_index = 1.0;
  double transmission = 1.0;
};

struct DelaySpectrum {
  std::vector<SpectrumRow> rows;
  /// GVD zero between the halves of the doublet, for catalogs with two or more lines.
  std::optional<double> gvd_zero_nm;
  std::optional<double> plateau_delay;  ///< s, at the GVD zero
  std::optional<UniformBand> uniform_band;
};

inline DelaySpectrum delay_spectrum(const VaporCell& cell, double lambda_min_nm,
                                    double lambda_max_nm, double step_nm) {
  validate(cell);
  DelaySpectrum out;
  for (double nm : inclusive_range(lambda_min_nm, lambda_max_nm, step_nm)) {
    const double omega = nm_to_omega(nm);
    out.rows.push_back({nm, group_delay(cell, omega), group_index(cell, omega),
                        transmission(cell, omega)});
  }
  if (cell.catalog.lines.size() >= 2) {
    const double center = find_gvd_zero_between_lines(cell);
    out.gvd_zero_nm = omega_to_nm(center);
    out.plateau_delay = group_delay(cell, center);
    out.uniform_band = uniform_group_index_band(cell, center, 0.5);
  }
  return out;
}

// --- temperature sweeps ---------------------------------------------------------

struct TemperaturePoint {
  double temperature_c = 0.0;
  PropagationReport report;
};

inline std::vector<TemperaturePoint> temperature_sweep(const VaporCell& cell_template,
                                                       const PulseRecipe& recipe,
                                                       const std::vector<double>& temperatures_c,
                                                       const SimulationOptions& options = {},
                                                       unsigned threads = 0) {
  if (temperatures_c.empty()) throw ConfigError("temperature sweep needs at least one point");
  return parallel_map(
      temperatures_c,
      [&](const double& t) {
        VaporCell cell = cell_template;
        cell.temperature = Kelvin{Celsius{t}};
        return TemperaturePoint{t, simulate(cell, recipe, options)};
      },
      threads);
}

struct NamedRecipe {
  std::string name;
  PulseRecipe recipe;
};

struct BroadeningRow {
  double temperature_c = 0.0;
  double fractional_delay = 0.0;
  double fractional_broadening = 0.0;
  double leakage = 0.0;
};

struct BroadeningCurve {
  NamedRecipe recipe;
  std::vector<BroadeningRow> rows;
};

/// f_D, f_B and leakage against temperature for several pulse recipes.
inline std::vector<BroadeningCurve> fb_leakage_curves(const VaporCell& cell_template,
                                                      const std::vector<NamedRecipe>& recipes,
                                                      const std::vector<double>& temperatures_c,
                                                      const SimulationOptions& options = {},
                                                      unsigned threads = 0) {
  std::vector<BroadeningCurve> out;
  for (const auto& named : recipes) {
    BroadeningCurve curve{named, {}};
    for (const auto& p :
         temperature_sweep(cell_template, named.recipe, temperatures_c, options, threads)) {
      curve.rows.push_back({p.temperature_c, p.report.fractional_delay,
                            p.report.fractional_broadening, p.report.leakage});
    }
    out.push_back(std::move(curve));
  }
  return out;
}

// --- best fractional delay under a distortion budget -----------------------------

struct DesignQuery {
  double bandwidth = 0.0;  ///< rectangular spectral width, Hz
  double max_distortion = 0.05;
  double temperature_min_c = 25.0;
  double temperature_max_c = 350.0;
  double temperature_step_c = 1.0;
  /// Carrier; defaults to the GVD zero between the halves of the doublet.
  std::optional<double> carrier;
};

struct DesignResult {
  double bandwidth = 0.0;  ///< Hz
  double t0 = 0.0;         ///< s, sinc intensity FWHM for this bandwidth
  double carrier = 0.0;
  bool feasible = false;
  bool limited_by_range = false;  ///< budget still met at the top of the range
  double temperature_c = 0.0;
  double fractional_delay = 0.0;
  Distortion distortion;
};

namespace detail {

struct DesignProbe {
  const VaporCell* cell_template;
  SampledGrid grid;
  FrequencyBand band;
  double carrier;
  double t0;
  double max_distortion;

  struct Sample {
    bool feasible = false;
    double fractional_delay = 0.0;
    Distortion distortion;
  };

  Sample operator()(double temperature_c) const {
    VaporCell cell = *cell_template;
    cell.temperature = Kelvin{Celsius{temperature_c}};
    Sample s;
    try {
      const auto tf = transfer_function(cell, grid, carrier, true, band);
      s.distortion = distortion(tf, band);
    } catch (const ModelValidityError&) {
      return s;
    }
    s.fractional_delay = group_delay(cell, carrier) / t0;
    s.feasible = s.distortion.amplitude < max_distortion && s.distortion.phase < max_distortion;
    return s;
  }
};

}  // namespace detail

/// Largest fractional delay t_D/T0 for a rectangular-spectrum pulse whose
/// transfer function keeps D_a and D_p below the budget.  Temperature is the
/// only knob: a 1-degree scan, then golden-section refinement of the edge of
/// the feasible region.  The delay is the vapor-model group delay at the carrier.
inline DesignResult max_fractional_delay(const VaporCell& cell_template, const DesignQuery& query) {
  validate(cell_template);
  if (!(query.bandwidth > 0.0)) throw ConfigError("design bandwidth must be positive");
  if (!(query.max_distortion > 0.0)) throw ConfigError("distortion budget must be positive");
  if (!(query.temperature_step_c > 0.0 && query.temperature_step_c <= 1.0)) {
    throw ConfigError("design temperature step must be in (0, 1] degC");
  }
  const double carrier = query.carrier ? *query.carrier : find_gvd_zero_between_lines(cell_template);
  const auto recipe = sinc_with_bandwidth(query.bandwidth, carrier);
  const double half_width = 0.5 * kTwoPi * query.bandwidth;
  const SampledGrid grid(2048, 1.0 / (8.0 * query.bandwidth));
  const detail::DesignProbe probe{&cell_template,
                                  grid,
                                  {-half_width, half_width},
                                  carrier,
                                  recipe.t0,
                                  query.max_distortion};
  // range check up front so an invalid range is a RangeError, not "infeasible"
  (void)number_density(cell_template.density, Kelvin{Celsius{query.temperature_min_c}});
  (void)number_density(cell_template.density, Kelvin{Celsius{query.temperature_max_c}});

  const auto temps =
      inclusive_range(query.temperature_min_c, query.temperature_max_c, query.temperature_step_c);
  std::vector<detail::DesignProbe::Sample> samples;
  samples.reserve(temps.size());
  for (double t : temps) samples.push_back(probe(t));

  DesignResult result;
  result.bandwidth = query.bandwidth;
  result.t0 = recipe.t0;
  result.carrier = carrier;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].feasible &&
        (!best || samples[i].fractional_delay > samples[*best].fractional_delay)) {
      best = i;
    }
  }
  if (!best) return result;

  double best_t = temps[*best];
  auto best_sample = samples[*best];
  if (*best + 1 < temps.size() && !samples[*best + 1].feasible) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = temps[*best];
    double b = temps[*best + 1];
    const auto score = [&](double t, detail::DesignProbe::Sample& s) {
      s = probe(t);
      if (s.feasible && s.fractional_delay > best_sample.fractional_delay) {
        best_sample = s;
        best_t = t;
      }
      return s.feasible ? s.fractional_delay : -1.0;
    };
    detail::DesignProbe::Sample s1;
    detail::DesignProbe::Sample s2;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = score(x1, s1);
    double f2 = score(x2, s2);
    while (b - a > 1e-5) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = score(x2, s2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = score(x1, s1);
      }
    }
  } else if (*best + 1 == temps.size()) {
    result.limited_by_range = true;
  }
  result.feasible = true;
  result.temperature_c = best_t;
  result.fractional_delay = best_sample.fractional_delay;
  result.distortion = best_sample.distortion;
  return result;
}

/// One design result per bandwidth, evaluated in parallel, returned in input order.
inline std::vector<DesignResult> design_curve(const VaporCell& cell_template,
                                              const std::vector<double>& bandwidths_hz,
                                              DesignQuery query, unsigned threads = 0) {
  return parallel_map(
      bandwidths_hz,
      [&](const double& bw) {
        DesignQuery q = query;
        q.bandwidth = bw;
        return max_fractional_delay(cell_template, q);
      },
      threads);
}

// --- broadening regime (absorption vs dispersion) ---------------------------------

struct RegimeQuery {
  double t0 = 0.0;       ///< s
  double linewidth = 0.0;  ///< gamma, rad/s
  double half_separation = 0.0;  ///< omega_21, rad/s
};

inline void validate(const RegimeQuery& q) {
  if (!(q.t0 > 0.0 && q.linewidth > 0.0 && q.half_separation > 0.0)) {
    throw ConfigError("regime query: T0, gamma and omega_21 must all be positive");
  }
}

/// L_A / L_D: path length for absorption-induced broadening (f_B = 1) over the
/// length for dispersion-induced broadening, for a Gaussian pulse centred
/// between two equal Lorentzian lines.
inline double regime_ratio(const RegimeQuery& q) {
  validate(q);
  const double r2 = std::pow(q.half_separation / q.linewidth, 2);
  const double singular = 6.0 * r2 - 2.0;
  if (std::abs(singular) <= 1e-12 * std::max(1.0, 6.0 * r2)) {
    throw SingularityError("regime ratio is singular at (omega_21/gamma)^2 = 1/3");
  }
  const double numerator = std::abs(-6.0 + 36.0 * r2 - 6.0 * r2 * r2);
  return numerator / (2.0 * q.linewidth * q.t0 * (r2 + 1.0) * singular);
}

/// Large-separation limit 1/(2 gamma T0).
inline double regime_ratio_asymptotic(const RegimeQuery& q) {
  validate(q);
  return 1.0 / (2.0 * q.linewidth * q.t0);
}

enum class BroadeningRegime { dispersion_dominated, absorption_dominated };

/// Whichever mechanism needs the shorter path to double the pulse width dominates.
inline BroadeningRegime classify_regime(double ratio) {
  return ratio > 1.0 ? BroadeningRegime::dispersion_dominated
                     : BroadeningRegime::absorption_dominated;
}

inline std::string to_string(BroadeningRegime regime) {
  return regime == BroadeningRegime::dispersion_dominated ? "dispersion-dominated"
                                                          : "absorption-dominated";
}

}  // namespace slowlight
