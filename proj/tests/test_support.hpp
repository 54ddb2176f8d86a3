#pragma once

#include <complex>
#include <string>
#include <vector>

#include "slowlight/catalog_io.hpp"
#include "slowlight/vapor_model.hpp"

namespace slowlight::testing {

inline std::string data_path(const std::string& name) {
  return std::string(SLOWLIGHT_DATA_DIR) + "/" + name;
}

inline double calibrated_scale() {
  static const double scale =
      calibrate_density_scale(rubidium_two_line_catalog(), rubidium_density_model()).scale;
  return scale;
}

/// Calibrated two-line Rb cell.
inline VaporCell rb_cell(double temperature_c, double length = 0.07, int passes = 1) {
  return VaporCell{rubidium_two_line_catalog(), rubidium_density_model(),
                   Kelvin{Celsius{temperature_c}}, length, passes, calibrated_scale()};
}

/// Two equal lines placed symmetrically about `center`.
inline LineCatalog symmetric_pair(double center, double half_separation, double gamma,
                                  double strength = 3e-13) {
  return LineCatalog{"symmetric",
                     {{"red", strength, center - half_separation, gamma},
                      {"blue", strength, center + half_separation, gamma}}};
}

/// Independent Lorentzian sum -N sum s/(w - w_j + i g), written out directly.
inline std::complex<double> chi_oracle(const LineCatalog& c, double density, double omega) {
  std::complex<double> sum = 0.0;
  for (const auto& l : c.lines) {
    const double d = omega - l.center;
    sum += l.strength * std::complex<double>(d, -l.linewidth) / (d * d + l.linewidth * l.linewidth);
  }
  return -density * sum;
}

}  // namespace slowlight::testing
