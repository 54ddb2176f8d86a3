#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slowlight/cli/run_config.hpp"
#include "slowlight/format.hpp"
#include "slowlight/metrics.hpp"
#include "slowlight/simulation.hpp"
#include "slowlight/sweeps.hpp"

namespace slowlight::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalError = 3 };

/// Summary values are written as "# key=value" comments in CSV and as an
/// object in JSON.
using Summary = std::map<std::string, double>;

namespace detail {

inline void write_output(const ResolvedRun& run, const std::string& command, const Table& table,
                         const Summary& summary, std::ostream& out) {
  if (run.config.output_format == "json") {
    json rows = json::array();
    for (const auto& r : table.rows) rows.push_back(r);
    json doc{{"command", command},
             {"config", to_json(run)},
             {"summary", summary},
             {"columns", table.columns},
             {"rows", rows}};
    out << doc.dump(2) << '\n';
    return;
  }
  Table t = table;
  t.comments.insert(t.comments.begin(), "config: " + to_json(run).dump());
  t.comments.insert(t.comments.begin(), "slowlight " + command);
  for (const auto& [k, v] : summary) t.comments.push_back(k + "=" + format_number(v));
  write_csv(out, t);
}

inline void emit(const ResolvedRun& run, const std::string& command, const Table& table,
                 const Summary& summary, std::ostream& console) {
  if (run.config.output_path.empty()) {
    write_output(run, command, table, summary, console);
    return;
  }
  std::ofstream file(run.config.output_path);
  if (!file) throw ConfigError("output.path: cannot write '" + run.config.output_path + "'");
  write_output(run, command, table, summary, file);
}

/// "<dir>/<stem>.<suffix>.csv" next to the main output file.
inline std::filesystem::path companion(const std::string& output, const std::string& suffix) {
  std::filesystem::path p(output);
  return p.parent_path() / (p.stem().string() + "." + suffix + ".csv");
}

}  // namespace detail

/// Group delay, group index and transmission against wavelength.
inline void cmd_spectrum(const RunConfig& config, std::ostream& console = std::cout) {
  const auto run = resolve(config);
  const auto spec =
      delay_spectrum(run.cell, config.lambda_min_nm, config.lambda_max_nm, config.lambda_step_nm);
  Table table{{"wavelength_nm", "group_delay_ps", "group_index", "transmission"}, {}, {}};
  for (const auto& r : spec.rows) {
    table.add_row({r.wavelength_nm, r.group_delay * 1e12, r.group_index, r.transmission});
  }
  Summary summary{{"density_scale", run.cell.density_scale},
                  {"number_density_per_m3", number_density(run.cell)}};
  if (spec.gvd_zero_nm) {
    summary["gvd_zero_nm"] = *spec.gvd_zero_nm;
    summary["plateau_delay_ps"] = *spec.plateau_delay * 1e12;
    summary["uniform_band_low_nm"] = omega_to_nm(spec.uniform_band->omega_high);
    summary["uniform_band_high_nm"] = omega_to_nm(spec.uniform_band->omega_low);
    summary["uniform_band_width_nm"] = spec.uniform_band->width_nm();
    summary["uniform_band_width_thz"] = spec.uniform_band->width_hz() * 1e-12;
  }
  detail::emit(run, "spectrum", table, summary, console);
}

inline std::vector<std::string> report_columns() {
  return {"t0_fs",           "output_fwhm_fs",   "delay_ps",         "group_delay_ps",
          "fractional_delay", "fractional_broadening", "amplitude_distortion",
          "phase_distortion", "leakage",         "absorbed"};
}

inline std::vector<double> report_row(const PropagationReport& r) {
  return {r.t0 * 1e15,          r.output_fwhm * 1e15,    r.delay * 1e12,
          r.group_delay * 1e12, r.fractional_delay,      r.fractional_broadening,
          r.amplitude_distortion, r.phase_distortion,    r.leakage,
          r.absorbed};
}

/// One propagation.  With an output path, also writes <stem>.input.csv,
/// <stem>.output.csv (t, Re E, Im E) and <stem>.transfer.csv (lambda, |H|, phase).
inline void cmd_propagate(const RunConfig& config, std::ostream& console = std::cout) {
  const auto run = resolve(config);
  const auto recipe = recipe_for(run, config.pulse);
  const auto options = simulation_options(config);
  const auto report = simulate(run.cell, recipe, options);
  Table table{report_columns(), {report_row(report)}, {}};
  Summary summary{{"density_scale", run.cell.density_scale},
                  {"carrier_nm", omega_to_nm(recipe.carrier)},
                  {"grid_samples", static_cast<double>(report.input.grid.size())},
                  {"grid_time_step_fs", report.input.grid.time_step() * 1e15}};
  detail::emit(run, "propagate", table, summary, console);
  if (config.output_path.empty()) return;
  const auto write = [](const std::filesystem::path& p, auto&& body) {
    std::ofstream f(p);
    if (!f) throw ConfigError("output.path: cannot write '" + p.string() + "'");
    body(f);
  };
  write(detail::companion(config.output_path, "input"),
        [&](std::ostream& f) { write_envelope(f, report.input); });
  write(detail::companion(config.output_path, "output"),
        [&](std::ostream& f) { write_envelope(f, report.output); });
  const auto tf = transfer_function(run.cell, report.input.grid, recipe.carrier, true);
  write(detail::companion(config.output_path, "transfer"),
        [&](std::ostream& f) { write_transfer_function(f, tf); });
}

/// Temperature sweep for one or more pulse recipes.
inline void cmd_sweep(const RunConfig& config, std::ostream& console = std::cout,
                      unsigned threads = 0) {
  const auto run = resolve(config);
  if (config.sweep_temperatures_c.empty()) {
    throw ConfigError("sweep: needs 'temperatures_c' or a temperature range");
  }
  std::vector<PulseBlock> pulses = config.sweep_pulses;
  if (pulses.empty()) pulses.push_back(config.pulse);
  auto columns = report_columns();
  columns.insert(columns.begin(), {"recipe", "temperature_c"});
  Table table{columns, {}, {}};
  const auto options = simulation_options(config);
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const auto recipe = recipe_for(run, pulses[i]);
    table.comments.push_back("recipe " + std::to_string(i) + ": " +
                             (pulses[i].name.empty() ? to_string(pulses[i].shape)
                                                     : pulses[i].name) +
                             " center_nm=" + format_number(omega_to_nm(recipe.carrier)) +
                             " t0_fs=" + format_number(recipe.t0 * 1e15));
    for (const auto& p :
         temperature_sweep(run.cell, recipe, config.sweep_temperatures_c, options, threads)) {
      auto row = report_row(p.report);
      row.insert(row.begin(), {static_cast<double>(i), p.temperature_c});
      table.add_row(std::move(row));
    }
  }
  detail::emit(run, "sweep", table, {{"density_scale", run.cell.density_scale}}, console);
}

/// Best fractional delay against bandwidth under the distortion budget.
inline void cmd_design(const RunConfig& config, std::ostream& console = std::cout,
                       unsigned threads = 0) {
  const auto run = resolve(config);
  if (config.design_bandwidths_nm.empty()) {
    throw ConfigError("design: needs 'bandwidths_nm' or a bandwidth range");
  }
  DesignQuery query;
  query.max_distortion = config.design_max_distortion;
  query.temperature_min_c = config.design_temperature_min_c;
  query.temperature_max_c = config.design_temperature_max_c;
  query.temperature_step_c = config.design_temperature_step_c;
  const double carrier = config.design_center_nm ? nm_to_omega(*config.design_center_nm)
                                                 : find_gvd_zero_between_lines(run.cell);
  query.carrier = carrier;
  const double center_nm = omega_to_nm(carrier);
  std::vector<double> bandwidths;
  for (double nm : config.design_bandwidths_nm) {
    if (!(nm > 0.0)) throw ConfigError("design.bandwidths_nm: must be positive");
    bandwidths.push_back(bandwidth_hz_from_nm(nm, center_nm));
  }
  Table table{{"bandwidth_nm", "bandwidth_thz", "t0_fs", "feasible", "limited_by_range",
               "temperature_c", "fractional_delay", "amplitude_distortion", "phase_distortion"},
              {},
              {}};
  const auto results = design_curve(run.cell, bandwidths, query, threads);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    table.add_row({config.design_bandwidths_nm[i], r.bandwidth * 1e-12, r.t0 * 1e15,
                   r.feasible ? 1.0 : 0.0, r.limited_by_range ? 1.0 : 0.0, r.temperature_c,
                   r.fractional_delay, r.distortion.amplitude, r.distortion.phase});
  }
  detail::emit(run, "design", table,
               {{"density_scale", run.cell.density_scale}, {"center_nm", center_nm}}, console);
}

/// L_A/L_D record as JSON.
inline json cmd_regime(const RegimeQuery& q) {
  const double exact = regime_ratio(q);
  const double asymptotic = regime_ratio_asymptotic(q);
  return {{"t0_s", q.t0},
          {"gamma_rad_per_s", q.linewidth},
          {"omega21_rad_per_s", q.half_separation},
          {"separation_over_linewidth", q.half_separation / q.linewidth},
          {"ratio_exact", exact},
          {"ratio_asymptotic", asymptotic},
          {"exact_over_asymptotic", exact / asymptotic},
          {"regime", to_string(classify_regime(exact))}};
}

/// Runs `body`, mapping library errors onto the documented exit codes.
template <typename Body>
int run_guarded(Body&& body, std::ostream& err = std::cerr) {
  try {
    body();
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const RangeError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace slowlight::cli
