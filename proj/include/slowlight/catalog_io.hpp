#pragma once

// JSON line-catalog files.
//
// {
//   "label": "...",
//   "lines": [
//     {"name": "D1", "wavelength_nm": 794.978995, "strength": 2.25e-13, "linewidth": 3.77e7},
//     {"name": "X",  "angular_frequency": 2.37e15, ...}
//   ],
//   "density_model": {
//     "name": "...",
//     "solid":  {"a": ..., "b": ..., "c": ..., "d": ...},
//     "liquid": {"a": ..., "b": ..., "c": ..., "d": ...},
//     "melting_point_k": 312.45,
//     "valid_range_k": [200, 800]
//   }
// }
//
// Each line carries exactly one of wavelength_nm / angular_frequency.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "slowlight/errors.hpp"
#include "slowlight/vapor_model.hpp"

namespace slowlight {

struct CatalogFile {
  LineCatalog catalog;
  DensityModel density;
};

namespace detail {

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  if (!obj.at(key).is_number()) {
    throw ConfigError(where + ": field '" + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

inline VaporPressureBranch parse_branch(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  return {require_number(obj, "a", where), require_number(obj, "b", where),
          require_number(obj, "c", where), require_number(obj, "d", where)};
}

}  // namespace detail

inline SpectralLine parse_line(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  SpectralLine line;
  line.name = obj.value("name", where);
  const bool has_wavelength = obj.contains("wavelength_nm");
  const bool has_omega = obj.contains("angular_frequency");
  if (has_wavelength == has_omega) {
    throw ConfigError(where + ": give exactly one of 'wavelength_nm' or 'angular_frequency'");
  }
  if (has_wavelength) {
    const double nm = detail::require_number(obj, "wavelength_nm", where);
    if (!(nm > 0.0)) throw ConfigError(where + ": wavelength_nm must be positive");
    line.center = nm_to_omega(nm);
  } else {
    line.center = detail::require_number(obj, "angular_frequency", where);
  }
  line.strength = detail::require_number(obj, "strength", where);
  line.linewidth = detail::require_number(obj, "linewidth", where);
  validate(line);
  return line;
}

inline DensityModel parse_density_model(const nlohmann::json& obj) {
  const std::string where = "density_model";
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  DensityModel model;
  model.name = obj.value("name", std::string("unnamed"));
  if (!obj.contains("solid") || !obj.contains("liquid")) {
    throw ConfigError(where + ": needs 'solid' and 'liquid' coefficient blocks");
  }
  model.solid = detail::parse_branch(obj.at("solid"), where + ".solid");
  model.liquid = detail::parse_branch(obj.at("liquid"), where + ".liquid");
  model.melting_point = detail::require_number(obj, "melting_point_k", where);
  if (obj.contains("valid_range_k")) {
    const auto& range = obj.at("valid_range_k");
    if (!range.is_array() || range.size() != 2 || !range[0].is_number() ||
        !range[1].is_number()) {
      throw ConfigError(where + ".valid_range_k must be [min, max]");
    }
    model.min_temperature = range[0].get<double>();
    model.max_temperature = range[1].get<double>();
    if (!(model.min_temperature > 0.0 && model.min_temperature < model.max_temperature)) {
      throw ConfigError(where + ".valid_range_k must satisfy 0 < min < max");
    }
  }
  return model;
}

inline CatalogFile parse_catalog(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("catalog must be a JSON object");
  CatalogFile out;
  out.catalog.label = doc.value("label", std::string("unnamed"));
  if (!doc.contains("lines") || !doc.at("lines").is_array()) {
    throw ConfigError("catalog: 'lines' must be an array");
  }
  const auto& lines = doc.at("lines");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.catalog.lines.push_back(parse_line(lines[i], "lines[" + std::to_string(i) + "]"));
  }
  validate(out.catalog);
  if (!doc.contains("density_model")) {
    throw ConfigError("catalog: missing 'density_model' block");
  }
  out.density = parse_density_model(doc.at("density_model"));
  return out;
}

inline CatalogFile parse_catalog_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("catalog: invalid JSON: ") + e.what());
  }
  return parse_catalog(doc);
}

inline CatalogFile load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open catalog file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_catalog_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline nlohmann::json to_json(const CatalogFile& file) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& line : file.catalog.lines) {
    lines.push_back({{"name", line.name},
                     {"angular_frequency", line.center},
                     {"strength", line.strength},
                     {"linewidth", line.linewidth}});
  }
  const auto branch = [](const VaporPressureBranch& b) {
    return nlohmann::json{{"a", b.a}, {"b", b.b}, {"c", b.c}, {"d", b.d}};
  };
  return {{"label", file.catalog.label},
          {"lines", lines},
          {"density_model",
           {{"name", file.density.name},
            {"solid", branch(file.density.solid)},
            {"liquid", branch(file.density.liquid)},
            {"melting_point_k", file.density.melting_point},
            {"valid_range_k", {file.density.min_temperature, file.density.max_temperature}}}}};
}

}  // namespace slowlight
