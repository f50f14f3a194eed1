#include "auxcell/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <tuple>

#include <Eigen/LU>

#include "auxcell/error.hpp"

namespace auxcell {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string describe(const char* format, double a, double b) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, format, a, b);
  return buffer;
}

/// J - sum l_k C_k (+ 1/2 sum beta_k C_k^2 in augmented mode) with frozen l, beta.
double lagrangian_value(const Evaluation& eval, const ConstraintState& c, const PhaseSet& phases) {
  double value = eval.objective;
  for (int k = 0; k < 4; ++k) {
    if (!phases.constrained[k]) continue;
    const double ck = eval.volumes[k] - phases.volume_targets[k];
    value -= c.multipliers[k] * ck;
    if (c.mode == ConstraintMode::Augmented) value += 0.5 * c.penalties[k] * ck * ck;
  }
  return value;
}

CheckResult homogeneous_check(const Config& config, int threads) {
  const UnitCellMesh mesh = build_mesh(20);
  PhaseSet phases = config.phase_set();
  phases.epsilon = config.numerics.epsilon_factor / 20.0;
  const NodalField inside = NodalField::Constant(mesh.periodic_node_count(), -1.0);
  const TensorField field = material_field(mesh, inside, inside, phases);
  CellSolverOptions options;
  options.tolerance = config.numerics.cg_tolerance;
  options.threads = threads;
  const CellSolutions sol = solve_cell_problems(mesh, field, options);
  const ElasticTensor4 ah = homogenized_tensor(mesh, field, sol).tensor;
  const Eigen::Matrix3d& ref = phases.tensors[0].voigt();
  const double error = (ah.voigt() - ref).norm() / ref.norm();
  double chi_max = 0.0;
  for (const auto& chi : sol.chi) chi_max = std::max(chi_max, chi.cwiseAbs().maxCoeff());
  CheckResult r{"homogeneous cell", error <= 1e-8 && chi_max <= 1e-12, error, 1e-8,
                describe("relative A^H error %.3e, max |chi| %.3e", error, chi_max)};
  return r;
}

CheckResult laminate_check(const Config& config, int threads) {
  const int n = config.mesh_n;
  const UnitCellMesh mesh = build_mesh(n);
  const PhaseSet phases = config.phase_set();
  const MultiLevelSet sets = laminate_level_sets(mesh);
  const TensorField field = material_field(mesh, sets.phi[0], sets.phi[1], phases);
  CellSolverOptions options;
  options.tolerance = config.numerics.cg_tolerance;
  options.threads = threads;
  const CellSolutions sol = solve_cell_problems(mesh, field, options);
  const HomogenizedTensor ah = homogenized_tensor(mesh, field, sol);
  const ElasticTensor4 ref = laminate_tensor(phases.tensors[0], phases.tensors[2], 0.5);
  double worst = 0.0;
  const int entries[3][4] = {{1, 1, 1, 1}, {1, 1, 2, 2}, {2, 2, 2, 2}};
  for (const auto& idx : entries) {
    const double want = ref.at(idx[0], idx[1], idx[2], idx[3]);
    const double got = ah.tensor.at(idx[0], idx[1], idx[2], idx[3]);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  return {"laminate (phases 1 and 3, 50/50)", worst <= 0.02, worst, 0.02,
          describe("worst relative error %.3e on A1111, A1122, A2222 (A1111 = %.6f)", worst, ah.a1111())};
}

CheckResult symmetry_check(const Optimizer& opt, const OptState& state) {
  const auto& eval = state.current;
  const Eigen::Matrix3d raw = homogenized_matrix(opt.mesh(), eval.field, eval.solutions);
  const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff() / raw.cwiseAbs().maxCoeff();
  const ElasticTensor4 ah(raw);
  const Eigen::Matrix3d voigt_gap = voigt_average(opt.mesh(), eval.field).voigt() - ah.voigt();
  const Eigen::Matrix3d reuss_gap = ah.voigt() - reuss_average(opt.mesh(), eval.field).voigt();
  const double scale = ah.voigt().norm();
  const double vmin = ElasticTensor4(voigt_gap).min_eigenvalue() / scale;
  const double rmin = ElasticTensor4(reuss_gap).min_eigenvalue() / scale;
  const bool ok = asym <= 1e-12 && ah.is_positive_definite() && vmin >= -1e-9 && rmin >= -1e-9;
  return {"symmetry, positivity and Voigt/Reuss bounds", ok, asym, 1e-12,
          describe("min eig of (Voigt - A^H) %.3e, of (A^H - Reuss) %.3e (relative)", vmin, rmin)};
}

}  // namespace

ElasticTensor4 laminate_tensor(const ElasticTensor4& a, const ElasticTensor4& b, double f) {
  // Split the Voigt slots into t = {11} (strain continuous) and n = {22, 12}
  // (traction continuous).
  const auto blocks = [](const Eigen::Matrix3d& c) {
    const double ctt = c(0, 0);
    const Eigen::RowVector2d ctn = c.block<1, 2>(0, 1);
    const Eigen::Matrix2d cnn = c.block<2, 2>(1, 1);
    return std::make_tuple(ctt, ctn, cnn);
  };
  const auto [att, atn, ann] = blocks(a.voigt());
  const auto [btt, btn, bnn] = blocks(b.voigt());
  const Eigen::Matrix2d ainv = ann.inverse(), binv = bnn.inverse();
  const Eigen::Matrix2d nn = (f * ainv + (1 - f) * binv).inverse();
  const Eigen::RowVector2d tn_avg = f * atn * ainv + (1 - f) * btn * binv;
  const double schur = f * (att - atn * ainv * atn.transpose()) + (1 - f) * (btt - btn * binv * btn.transpose());
  Eigen::Matrix3d c;
  c(0, 0) = schur + tn_avg * nn * tn_avg.transpose();
  const Eigen::RowVector2d tn = tn_avg * nn;
  c.block<1, 2>(0, 1) = tn;
  c.block<2, 1>(1, 0) = tn.transpose();
  c.block<2, 2>(1, 1) = nn;
  return ElasticTensor4(c);
}

MultiLevelSet laminate_level_sets(const UnitCellMesh& mesh) {
  MultiLevelSet sets;
  const int count = mesh.periodic_node_count();
  sets.phi[0] = NodalField::Constant(count, -1.0);
  sets.phi[1].resize(count);
  for (int d = 0; d < count; ++d) sets.phi[1][d] = std::abs(mesh.dof_position(d).y()) - 0.25;
  return sets;
}

NodalField random_smooth_field(const UnitCellMesh& mesh, std::uint64_t seed, int modes) {
  std::mt19937_64 rng(seed);
  struct Mode {
    int kx, ky;
    double amplitude, phase;
  };
  std::vector<Mode> list;
  while (static_cast<int>(list.size()) < modes) {
    const int kx = static_cast<int>(rng() % 5) - 2;
    const int ky = static_cast<int>(rng() % 5) - 2;
    if (kx == 0 && ky == 0) continue;
    list.push_back({kx, ky, 0.5 + 0.5 * uniform01(rng), 2.0 * M_PI * uniform01(rng)});
  }
  const double constant = uniform01(rng) - 0.5;
  NodalField v(mesh.periodic_node_count());
  for (int d = 0; d < v.size(); ++d) {
    const Eigen::Vector2d y = mesh.dof_position(d);
    double s = constant;
    for (const auto& m : list) s += m.amplitude * std::cos(2.0 * M_PI * (m.kx * y.x() + m.ky * y.y()) + m.phase);
    v[d] = s;
  }
  return v / v.cwiseAbs().maxCoeff();
}

GradientCheck directional_derivative(const Optimizer& opt, const OptState& state, int i, const NodalField& v,
                                     double delta) {
  if (i != 0 && i != 1) throw ConfigError("level-set index must be 0 or 1");
  ConstraintState constraints = state.constraints;
  constraints.volumes = state.current.volumes;
  const NodalField w = v.cwiseProduct(central_gradient_norm(opt.mesh(), state.level_sets.phi[i]));

  // Outward normal motion by t v moves phi to phi - t v |grad phi|.
  auto value_at = [&](double t) {
    MultiLevelSet sets = state.level_sets;
    sets.phi[i] -= t * w;
    const Evaluation eval = opt.evaluate(sets, &state.current.solutions);
    return lagrangian_value(eval, constraints, opt.phases());
  };
  GradientCheck check;
  check.finite_difference = (value_at(delta) - value_at(-delta)) / (2.0 * delta);
  const NodalField grad = lagrangian_gradient(i, opt.mesh(), state.level_sets, state.current, opt.config().objective,
                                              constraints, opt.phases());
  check.predicted = -grad.dot(w);
  const double scale = std::max(std::abs(check.finite_difference), std::abs(check.predicted));
  check.relative_error = scale > 0.0 ? std::abs(check.finite_difference - check.predicted) / scale : 0.0;
  return check;
}

std::vector<CheckResult> run_validation(const Config& config, int threads) {
  std::vector<CheckResult> results;
  results.push_back(homogeneous_check(config, threads));
  results.push_back(laminate_check(config, threads));

  Config small = config;
  small.mesh_n = std::min(config.mesh_n, 50);
  const Optimizer opt(small, threads);
  OptState state = opt.initial_state();
  results.push_back(symmetry_check(opt, state));

  // Nonzero multipliers exercise the h* part of the gradient.
  for (int k = 0; k < 4; ++k) state.constraints.multipliers[k] = 0.05 * (k % 2 == 0 ? 1.0 : -1.0);
  double worst = 0.0;
  for (int p = 0; p < 10; ++p) {
    const NodalField v = random_smooth_field(opt.mesh(), config.seed + 1000 + p);
    const GradientCheck g = directional_derivative(opt, state, p % 2, v, 1e-3);
    worst = std::max(worst, g.relative_error);
  }
  results.push_back({"shape-gradient finite differences (10 directions)", worst <= 0.05, worst, 0.05,
                     describe("worst relative error %.3e at n = %.0f", worst, small.mesh_n)});
  return results;
}

}  // namespace auxcell
