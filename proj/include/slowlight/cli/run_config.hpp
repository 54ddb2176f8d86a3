#pragma once

// Run configuration for the command-line front end.  Configs are JSON
// objects with nested blocks; every field has a default except the catalog.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slowlight/catalog_io.hpp"
#include "slowlight/errors.hpp"
#include "slowlight/pulse.hpp"
#include "slowlight/sweeps.hpp"

namespace slowlight::cli {

using nlohmann::json;

/// Environment variable naming the fallback directory for catalog files.
inline constexpr const char* kCatalogDirEnv = "SLOWLIGHT_CATALOG_DIR";

struct PulseBlock {
  std::string name;
  PulseShape shape = PulseShape::sinc;
  std::optional<double> t0_fs;
  std::optional<double> bandwidth_nm;
  std::optional<double> center_nm;  ///< unset: GVD zero between the lines
};

struct CalibrationBlock {
  double target_delay_ps = 10.0;
  double temperature_c = 280.0;
  double length_m = 0.21;
};

struct RunConfig {
  std::filesystem::path base_dir;  ///< directory of the config file
  std::string catalog;

  double temperature_c = 25.0;
  double length_m = 0.07;
  int passes = 1;

  std::optional<double> density_scale;
  std::optional<CalibrationBlock> calibration;

  PulseBlock pulse;

  std::optional<std::size_t> grid_samples;
  std::optional<double> grid_time_step_fs;
  GridPolicy grid_policy;

  double lambda_min_nm = 772.0;
  double lambda_max_nm = 796.0;
  double lambda_step_nm = 0.01;

  std::vector<double> sweep_temperatures_c;
  std::vector<PulseBlock> sweep_pulses;

  std::vector<double> design_bandwidths_nm;
  double design_max_distortion = 0.05;
  double design_temperature_min_c = 25.0;
  double design_temperature_max_c = 350.0;
  double design_temperature_step_c = 1.0;
  std::optional<double> design_center_nm;

  std::string output_path;
  std::string output_format = "csv";
};

/// Command-line field overrides applied after the file is read.
struct Overrides {
  std::optional<double> temperature_c;
  std::optional<double> length_m;
  std::optional<int> passes;
  std::optional<double> t0_fs;
  std::optional<double> center_nm;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

namespace detail {

inline const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double number(const json& obj, const char* key, const std::string& where, double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(where + "." + key + ": must be a number");
  return v->get<double>();
}

inline std::optional<double> optional_number(const json& obj, const char* key,
                                             const std::string& where) {
  const json* v = find(obj, key);
  if (!v || v->is_null()) return std::nullopt;
  if (!v->is_number()) throw ConfigError(where + "." + key + ": must be a number");
  return v->get<double>();
}

inline std::string string(const json& obj, const char* key, const std::string& where,
                          const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(where + "." + key + ": must be a string");
  return v->get<std::string>();
}

inline std::vector<double> number_list(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return {};
  if (!v->is_array()) throw ConfigError(where + "." + key + ": must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : *v) {
    if (!x.is_number()) throw ConfigError(where + "." + key + ": must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline const json& block(const json& doc, const char* key) {
  static const json empty = json::object();
  const json* v = find(doc, key);
  if (!v) return empty;
  if (!v->is_object()) throw ConfigError(std::string(key) + ": must be an object");
  return *v;
}

/// Range block {min, max, step} and/or explicit list, merged, sorted, unique.
inline std::vector<double> values_from(const json& obj, const char* list_key,
                                       const char* min_key, const char* max_key,
                                       const char* step_key, const std::string& where) {
  auto values = number_list(obj, list_key, where);
  const bool has_range = find(obj, min_key) || find(obj, max_key) || find(obj, step_key);
  if (has_range) {
    const auto lo = optional_number(obj, min_key, where);
    const auto hi = optional_number(obj, max_key, where);
    const auto step = optional_number(obj, step_key, where);
    if (!lo || !hi || !step) {
      throw ConfigError(where + ": range needs '" + min_key + "', '" + max_key + "' and '" +
                        step_key + "'");
    }
    try {
      for (double x : inclusive_range(*lo, *hi, *step)) values.push_back(x);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

inline PulseBlock parse_pulse(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": must be an object");
  PulseBlock p;
  p.name = string(obj, "name", where, "");
  try {
    p.shape = parse_pulse_shape(string(obj, "shape", where, "sinc"));
  } catch (const ConfigError& e) {
    throw ConfigError(where + ".shape: " + e.what());
  }
  p.t0_fs = optional_number(obj, "t0_fs", where);
  p.bandwidth_nm = optional_number(obj, "bandwidth_nm", where);
  p.center_nm = optional_number(obj, "center_nm", where);
  if (p.t0_fs && p.bandwidth_nm) {
    throw ConfigError(where + ": give either 't0_fs' or 'bandwidth_nm', not both");
  }
  if (p.t0_fs && !(*p.t0_fs > 0.0)) throw ConfigError(where + ".t0_fs: must be positive");
  if (p.bandwidth_nm && !(*p.bandwidth_nm > 0.0)) {
    throw ConfigError(where + ".bandwidth_nm: must be positive");
  }
  if (p.center_nm && !(*p.center_nm > 0.0)) {
    throw ConfigError(where + ".center_nm: must be positive");
  }
  return p;
}

inline json to_json(const PulseBlock& p) {
  json out{{"shape", to_string(p.shape)}};
  if (!p.name.empty()) out["name"] = p.name;
  if (p.t0_fs) out["t0_fs"] = *p.t0_fs;
  if (p.bandwidth_nm) out["bandwidth_nm"] = *p.bandwidth_nm;
  if (p.center_nm) out["center_nm"] = *p.center_nm;
  return out;
}

}  // namespace detail

inline RunConfig parse_run_config(const json& doc, std::filesystem::path base_dir = {}) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunConfig c;
  c.base_dir = std::move(base_dir);
  c.catalog = string(doc, "catalog", "config", "");
  if (c.catalog.empty()) throw ConfigError("config.catalog: required (path to a line catalog)");

  const auto& cell = block(doc, "cell");
  c.temperature_c = number(cell, "temperature_c", "cell", c.temperature_c);
  c.length_m = number(cell, "length_m", "cell", c.length_m);
  const double passes = number(cell, "passes", "cell", c.passes);
  if (passes < 1 || passes != static_cast<int>(passes)) {
    throw ConfigError("cell.passes: must be a positive integer");
  }
  c.passes = static_cast<int>(passes);
  if (!(c.length_m > 0.0)) throw ConfigError("cell.length_m: must be positive");

  const auto& density = block(doc, "density");
  c.density_scale = optional_number(density, "scale", "density");
  if (find(density, "calibrate")) {
    const auto& cal = density.at("calibrate");
    if (!cal.is_object()) throw ConfigError("density.calibrate: must be an object");
    CalibrationBlock b;
    b.target_delay_ps = number(cal, "target_delay_ps", "density.calibrate", b.target_delay_ps);
    b.temperature_c = number(cal, "temperature_c", "density.calibrate", b.temperature_c);
    b.length_m = number(cal, "length_m", "density.calibrate", b.length_m);
    c.calibration = b;
  }
  if (c.density_scale && c.calibration) {
    throw ConfigError("density: give either 'scale' or 'calibrate', not both");
  }
  if (c.density_scale && !(*c.density_scale >= 0.0)) {
    throw ConfigError("density.scale: must be >= 0");
  }

  if (find(doc, "pulse")) c.pulse = parse_pulse(doc.at("pulse"), "pulse");

  const auto& grid = block(doc, "grid");
  if (const auto n = optional_number(grid, "samples", "grid")) {
    if (*n < 4 || *n != static_cast<double>(static_cast<std::size_t>(*n))) {
      throw ConfigError("grid.samples: must be an integer power of two >= 4");
    }
    c.grid_samples = static_cast<std::size_t>(*n);
  }
  c.grid_time_step_fs = optional_number(grid, "time_step_fs", "grid");
  if (c.grid_samples.has_value() != c.grid_time_step_fs.has_value()) {
    throw ConfigError("grid: 'samples' and 'time_step_fs' must be given together");
  }
  c.grid_policy.bandwidth_factor =
      number(grid, "bandwidth_factor", "grid", c.grid_policy.bandwidth_factor);
  c.grid_policy.duration_factor =
      number(grid, "duration_factor", "grid", c.grid_policy.duration_factor);
  c.grid_policy.wraparound_tolerance =
      number(grid, "wraparound_tolerance", "grid", c.grid_policy.wraparound_tolerance);

  const auto& spectrum = block(doc, "spectrum");
  c.lambda_min_nm = number(spectrum, "lambda_min_nm", "spectrum", c.lambda_min_nm);
  c.lambda_max_nm = number(spectrum, "lambda_max_nm", "spectrum", c.lambda_max_nm);
  c.lambda_step_nm = number(spectrum, "step_nm", "spectrum", c.lambda_step_nm);

  const auto& sweep = block(doc, "sweep");
  c.sweep_temperatures_c = values_from(sweep, "temperatures_c", "temperature_min_c",
                                       "temperature_max_c", "temperature_step_c", "sweep");
  if (const json* pulses = find(sweep, "pulses")) {
    if (!pulses->is_array()) throw ConfigError("sweep.pulses: must be an array");
    for (std::size_t i = 0; i < pulses->size(); ++i) {
      c.sweep_pulses.push_back(
          parse_pulse((*pulses)[i], "sweep.pulses[" + std::to_string(i) + "]"));
    }
  }

  const auto& design = block(doc, "design");
  c.design_bandwidths_nm = values_from(design, "bandwidths_nm", "bandwidth_min_nm",
                                       "bandwidth_max_nm", "bandwidth_step_nm", "design");
  c.design_max_distortion = number(design, "max_distortion", "design", c.design_max_distortion);
  c.design_temperature_min_c =
      number(design, "temperature_min_c", "design", c.design_temperature_min_c);
  c.design_temperature_max_c =
      number(design, "temperature_max_c", "design", c.design_temperature_max_c);
  c.design_temperature_step_c =
      number(design, "temperature_step_c", "design", c.design_temperature_step_c);
  c.design_center_nm = optional_number(design, "center_nm", "design");

  const auto& output = block(doc, "output");
  c.output_path = string(output, "path", "output", "");
  c.output_format = string(output, "format", "output", "csv");
  if (c.output_format != "csv" && c.output_format != "json") {
    throw ConfigError("output.format: must be 'csv' or 'json'");
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  json doc;
  try {
    doc = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

inline void apply(RunConfig& c, const Overrides& o) {
  if (o.temperature_c) c.temperature_c = *o.temperature_c;
  if (o.length_m) {
    if (!(*o.length_m > 0.0)) throw ConfigError("--length-m: must be positive");
    c.length_m = *o.length_m;
  }
  if (o.passes) {
    if (*o.passes < 1) throw ConfigError("--passes: must be >= 1");
    c.passes = *o.passes;
  }
  const auto apply_pulse = [&](PulseBlock& p) {
    if (o.t0_fs) {
      if (!(*o.t0_fs > 0.0)) throw ConfigError("--t0-fs: must be positive");
      p.t0_fs = *o.t0_fs;
      p.bandwidth_nm.reset();
    }
    if (o.center_nm) p.center_nm = *o.center_nm;
  };
  apply_pulse(c.pulse);
  for (auto& p : c.sweep_pulses) apply_pulse(p);
  if (o.out) c.output_path = *o.out;
  if (o.format) {
    if (*o.format != "csv" && *o.format != "json") {
      throw ConfigError("--format: must be 'csv' or 'json'");
    }
    c.output_format = *o.format;
  }
}

/// Catalog lookup order: absolute path, next to the config file, the
/// SLOWLIGHT_CATALOG_DIR directory, then the working directory.
inline std::filesystem::path resolve_catalog_path(const RunConfig& c) {
  namespace fs = std::filesystem;
  const fs::path given(c.catalog);
  std::vector<fs::path> candidates;
  if (given.is_absolute()) {
    candidates.push_back(given);
  } else {
    if (!c.base_dir.empty()) candidates.push_back(c.base_dir / given);
    if (const char* dir = std::getenv(kCatalogDirEnv); dir && *dir) {
      candidates.push_back(fs::path(dir) / given);
    }
    candidates.push_back(given);
  }
  for (const auto& p : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return p;
  }
  throw ConfigError("config.catalog: catalog file '" + c.catalog + "' not found");
}

/// Everything a command needs, with the density scale and pulse carrier resolved.
struct ResolvedRun {
  RunConfig config;
  CatalogFile catalog;
  VaporCell cell;
  std::optional<DensityCalibration> calibration;
};

inline ResolvedRun resolve(const RunConfig& config) {
  ResolvedRun run{config, load_catalog(resolve_catalog_path(config)), {}, {}};
  double scale = config.density_scale.value_or(1.0);
  if (config.calibration) {
    CalibrationTarget target;
    target.delay = config.calibration->target_delay_ps * 1e-12;
    target.temperature = Celsius{config.calibration->temperature_c};
    target.length = config.calibration->length_m;
    run.calibration = calibrate_density_scale(run.catalog.catalog, run.catalog.density, target);
    scale = run.calibration->scale;
  }
  run.cell = VaporCell{run.catalog.catalog, run.catalog.density,
                       Kelvin{Celsius{config.temperature_c}}, config.length_m, config.passes,
                       scale};
  validate(run.cell);
  // surface temperature range problems as config errors before any work
  try {
    (void)number_density(run.cell.density, run.cell.temperature);
  } catch (const RangeError& e) {
    throw ConfigError(std::string("cell.temperature_c: ") + e.what());
  }
  return run;
}

/// Carrier for a pulse block: its center wavelength, or the cell's GVD zero.
inline double carrier_for(const ResolvedRun& run, const PulseBlock& p) {
  return p.center_nm ? nm_to_omega(*p.center_nm) : find_gvd_zero_between_lines(run.cell);
}

inline PulseRecipe recipe_for(const ResolvedRun& run, const PulseBlock& p) {
  const double carrier = carrier_for(run, p);
  if (p.bandwidth_nm) {
    if (p.shape != PulseShape::sinc) {
      throw ConfigError("pulse.bandwidth_nm: only supported for sinc pulses; give t0_fs");
    }
    return sinc_with_bandwidth(bandwidth_hz_from_nm(*p.bandwidth_nm, omega_to_nm(carrier)),
                               carrier);
  }
  if (!p.t0_fs) throw ConfigError("pulse: needs 't0_fs' or 'bandwidth_nm'");
  return {p.shape, *p.t0_fs * 1e-15, carrier};
}

inline SimulationOptions simulation_options(const RunConfig& c) {
  SimulationOptions o;
  o.grid_policy = c.grid_policy;
  if (c.grid_samples) o.grid = SampledGrid(*c.grid_samples, *c.grid_time_step_fs * 1e-15);
  return o;
}

/// Resolved config as JSON, embedded in every output.
inline json to_json(const ResolvedRun& run) {
  const auto& c = run.config;
  json out;
  out["catalog"] = c.catalog;
  out["catalog_label"] = run.catalog.catalog.label;
  out["cell"] = {{"temperature_c", c.temperature_c}, {"length_m", c.length_m},
                 {"passes", c.passes}};
  out["density"] = {{"scale", run.cell.density_scale}};
  if (c.calibration) {
    out["density"]["calibrate"] = {{"target_delay_ps", c.calibration->target_delay_ps},
                                   {"temperature_c", c.calibration->temperature_c},
                                   {"length_m", c.calibration->length_m}};
  }
  out["pulse"] = detail::to_json(c.pulse);
  json grid{{"bandwidth_factor", c.grid_policy.bandwidth_factor},
            {"duration_factor", c.grid_policy.duration_factor},
            {"wraparound_tolerance", c.grid_policy.wraparound_tolerance}};
  if (c.grid_samples) {
    grid["samples"] = *c.grid_samples;
    grid["time_step_fs"] = *c.grid_time_step_fs;
  }
  out["grid"] = grid;
  out["spectrum"] = {{"lambda_min_nm", c.lambda_min_nm}, {"lambda_max_nm", c.lambda_max_nm},
                     {"step_nm", c.lambda_step_nm}};
  json pulses = json::array();
  for (const auto& p : c.sweep_pulses) pulses.push_back(detail::to_json(p));
  out["sweep"] = {{"temperatures_c", c.sweep_temperatures_c}, {"pulses", pulses}};
  out["design"] = {{"bandwidths_nm", c.design_bandwidths_nm},
                   {"max_distortion", c.design_max_distortion},
                   {"temperature_min_c", c.design_temperature_min_c},
                   {"temperature_max_c", c.design_temperature_max_c},
                   {"temperature_step_c", c.design_temperature_step_c}};
  if (c.design_center_nm) out["design"]["center_nm"] = *c.design_center_nm;
  out["output"] = {{"path", c.output_path}, {"format", c.output_format}};
  return out;
}

}  // namespace slowlight::cli
