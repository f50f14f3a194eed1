#pragma once

#include <string>
#include <vector>

#include "auxcell/config.hpp"
#include "auxcell/optimizer.hpp"

namespace auxcell {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Closed-form rank-one laminate of `a` (volume fraction `fraction`) and `b`
/// with layers stacked along y: strain e11 and tractions s22, s12 are
/// continuous across the layers.
ElasticTensor4 laminate_tensor(const ElasticTensor4& a, const ElasticTensor4& b, double fraction);

/// Level sets of the sharp 50/50 laminate: phase 1 for |y| < 1/4, phase 3 elsewhere.
MultiLevelSet laminate_level_sets(const UnitCellMesh& mesh);

/// Smooth periodic perturbation built from a few random Fourier modes, max |v| = 1.
NodalField random_smooth_field(const UnitCellMesh& mesh, std::uint64_t seed, int modes = 3);

/// Finite-difference check of the shape gradient of level set `i` along the
/// normal velocity `v`: compares (L(phi_i - delta w) - L(phi_i + delta w)) / (2 delta)
/// with w = v |grad phi_i| against the discrete gradient applied to -w.
struct GradientCheck {
  double finite_difference = 0.0;
  double predicted = 0.0;
  double relative_error = 0.0;
};
GradientCheck directional_derivative(const Optimizer& optimizer, const OptState& state, int i,
                                     const NodalField& v, double delta);

/// Oracle and invariant suite for the `validate` command.
std::vector<CheckResult> run_validation(const Config& config, int threads = 1);

}  // namespace auxcell
