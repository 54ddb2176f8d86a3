#pragma once

#include <cmath>
#include <optional>

#include "slowlight/metrics.hpp"
#include "slowlight/pulse.hpp"
#include "slowlight/vapor_model.hpp"

namespace slowlight {

struct SimulationOptions {
  GridPolicy grid_policy;
  /// Use this grid instead of sizing one from the policy (still validated).
  std::optional<SampledGrid> grid;
  LeakageOptions leakage;
};

namespace detail {

inline PropagationReport simulate_on(const VaporCell& cell, const PulseRecipe& recipe,
                                     const SampledGrid& grid, double expected_delay,
                                     const SimulationOptions& options) {
  const auto input = recipe.shape == PulseShape::gaussian
                         ? make_gaussian(recipe.t0, recipe.carrier, grid)
                         : make_sinc(recipe.t0, recipe.carrier, grid,
                                     options.grid_policy.wraparound_tolerance);
  const auto tf = transfer_function(cell, grid, recipe.carrier, true, spectral_band(input, 1e-2));
  const auto output = propagate(input, tf, options.grid_policy.wraparound_tolerance);
  return make_report(input, output, tf, expected_delay, options.leakage);
}

}  // namespace detail

/// Launch one pulse through one cell: grid sizing, pulse synthesis,
/// vacuum-referenced transfer function, propagation and metrics.
///
/// A policy-sized grid is doubled in length (same time step) while the output
/// wraps, up to grid_policy.max_samples.  Spectral wings that reach the lines
/// (Gaussian pulses) come out as a weak tail nanoseconds long.  An explicit
/// grid is used as given and a wrap is an error.
inline PropagationReport simulate(const VaporCell& cell, const PulseRecipe& recipe,
                                  const SimulationOptions& options = {}) {
  validate(cell);
  const double expected_delay = group_delay(cell, recipe.carrier);
  if (options.grid) {
    validate_grid(*options.grid, recipe, expected_delay, options.grid_policy);
    return detail::simulate_on(cell, recipe, *options.grid, expected_delay, options);
  }
  SampledGrid grid = grid_for(recipe, expected_delay, options.grid_policy);
  while (true) {
    try {
      return detail::simulate_on(cell, recipe, grid, expected_delay, options);
    } catch (const WraparoundError&) {
      if (2 * grid.size() > options.grid_policy.max_samples) throw;
      grid = SampledGrid(2 * grid.size(), grid.time_step());
    }
  }
}

}  // namespace slowlight
