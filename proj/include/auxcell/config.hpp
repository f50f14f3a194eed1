#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "auxcell/homogenizer.hpp"
#include "auxcell/level_set.hpp"
#include "auxcell/material.hpp"
#include "auxcell/shape_gradient.hpp"

namespace auxcell {

struct PhaseModuli {
  double young = 1.0;
  double poisson = 0.3;
};

/// Numerical knobs of the optimizer; lengths are in units of the grid spacing.
struct NumericsConfig {
  /// Interface half-width eps = epsilon_factor * dx.
  double epsilon_factor = 2.0;
  /// Velocity regularization length alpha = alpha_factor * dx.
  double alpha_factor = 4.0;
  double cg_tolerance = 1e-9;
  /// <= 0 selects 10 * DOF.
  int cg_max_iterations = 0;
  int reinit_every = 5;
  int reinit_steps = 50;
  int line_search_trials = 8;
  double line_search_shrink = 0.5;
  /// Step tried, as a fraction of the CFL step, after the line search fails.
  double fallback_step = 1e-3;
  /// Consecutive failed line searches that raise the stagnation flag.
  int stagnation_limit = 3;
  /// Project out the part of the constraint velocity that would raise J.
  bool descent_safeguard = true;
};

/// A fully resolved run description.
///
/// The JSON schema mirrors the field layout; see README.md. Every key is
/// optional and defaults to the `example1` preset.
struct Config {
  std::string preset = "example1";
  int mesh_n = 100;
  PlaneModel plane = PlaneModel::Stress;
  std::array<PhaseModuli, 4> phases{};
  ObjectiveSpec objective;
  /// Unset entries are unconstrained phases.
  std::array<std::optional<double>, 4> volume_targets{};
  ConstraintMode mode = ConstraintMode::Plain;
  ConstraintParams constraint;
  int iterations = 200;
  int snapshot_every = 10;
  std::array<PatternSpec, 2> init{};
  NumericsConfig numerics;
  std::uint64_t seed = 0;

  /// Phase tensors, volume targets and eps = epsilon_factor / mesh_n.
  PhaseSet phase_set() const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Names of the built-in presets (example1 .. example4).
std::vector<std::string> preset_names();
/// One-line description of a preset.
std::string preset_summary(const std::string& name);
Config preset(const std::string& name);

/// Parses a JSON document; an empty document yields the example1 preset.
/// Unknown keys are errors. Syntax errors report line and column.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// Canonical JSON with every field resolved (defaults included).
std::string serialize_config(const Config& config);

}  // namespace auxcell
