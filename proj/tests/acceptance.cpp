// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "auxcell/error.hpp"
#include "auxcell/io.hpp"
#include "auxcell/optimizer.hpp"
#include "auxcell/validation.hpp"

using namespace auxcell;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, fmt, args...);
  return buffer;
}

PhaseSet preset_phases(double eps) {
  PhaseSet p;
  p.tensors = {isotropic_tensor(0.91, 0.3), isotropic_tensor(1e-4, 0.3), isotropic_tensor(1.82, 0.3),
               isotropic_tensor(1e-4, 0.3)};
  p.epsilon = eps;
  return p;
}

NodalField random_level_set(const UnitCellMesh& mesh, std::uint64_t seed) {
  // Smooth field with a random offset so the zero set is not symmetric.
  NodalField v = random_smooth_field(mesh, seed, 4);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const double shift = std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
  v.array() += shift;
  if (!has_interface(v)) v.array() -= v.mean();
  return 0.1 * v;
}

Outcome homogeneous_cell() {
  const auto start = Clock::now();
  const UnitCellMesh mesh = build_mesh(20);
  const PhaseSet phases = preset_phases(0.1);
  const NodalField inside = NodalField::Constant(mesh.periodic_node_count(), -1.0);
  const TensorField field = material_field(mesh, inside, inside, phases);
  const CellSolutions sol = solve_cell_problems(mesh, field, {});
  const ElasticTensor4 ah = homogenized_tensor(mesh, field, sol).tensor;
  const double error = (ah.voigt() - phases.tensors[0].voigt()).norm() / phases.tensors[0].voigt().norm();
  double chi = 0.0;
  for (const auto& c : sol.chi) chi = std::max(chi, c.cwiseAbs().maxCoeff());
  const double t = seconds_since(start);
  return {error <= 1e-8 && chi <= 1e-12 && t < 1.0,
          format("relative error %.2e (<= 1e-8), max|chi| %.2e, %.2f s (< 1 s)", error, chi, t)};
}

Outcome laminate() {
  const auto start = Clock::now();
  // Closed-form values from tests/oracles/laminate_oracle.py.
  const double want[3] = {1.485, 0.4, 1.333333333333333};
  const UnitCellMesh mesh = build_mesh(100);
  const PhaseSet phases = preset_phases(0.02);
  const MultiLevelSet sets = laminate_level_sets(mesh);
  const TensorField field = material_field(mesh, sets.phi[0], sets.phi[1], phases);
  const HomogenizedTensor ah = homogenized_tensor(mesh, field, solve_cell_problems(mesh, field, {}));
  const double got[3] = {ah.a1111(), ah.a1122(), ah.a2222()};
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(got[k] - want[k]) / std::abs(want[k]));
  const double t = seconds_since(start);
  return {worst <= 0.02 && t < 30.0,
          format("A=(%.4f, %.4f, %.4f) vs (1.485, 0.4, 1.3333), worst %.2f%% (<= 2%%), %.1f s (< 30 s)", got[0],
                 got[1], got[2], 100 * worst, t)};
}

Outcome symmetry_and_bounds() {
  const auto start = Clock::now();
  const UnitCellMesh mesh = build_mesh(16);
  const PhaseSet phases = preset_phases(2.0 * mesh.dx());
  const CellSolver solver(mesh);
  int failures = 0;
  double worst_asym = 0.0, worst_bound = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const TensorField field = material_field(mesh, random_level_set(mesh, 1000 + 2 * s),
                                             random_level_set(mesh, 1001 + 2 * s), phases);
    const Eigen::Matrix3d raw = homogenized_matrix(mesh, field, solver.solve(field, {}));
    const double scale = raw.cwiseAbs().maxCoeff();
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale;
    const ElasticTensor4 ah(raw);
    const double vgap = ElasticTensor4(voigt_average(mesh, field).voigt() - raw).min_eigenvalue() / raw.norm();
    const double rgap = ElasticTensor4(raw - reuss_average(mesh, field).voigt()).min_eigenvalue() / raw.norm();
    worst_asym = std::max(worst_asym, asym);
    worst_bound = std::min({worst_bound, vgap, rgap});
    failures += !(asym <= 1e-12 && ah.is_positive_definite() && vgap >= -1e-9 && rgap >= -1e-9);
  }
  const double t = seconds_since(start);
  return {failures == 0 && t < 60.0,
          format("50 states at n=16: %d failures, worst asymmetry %.1e (<= 1e-12), worst bound gap %.1e, %.1f s",
                 failures, worst_asym, worst_bound, t)};
}

Outcome gradient_fidelity() {
  Config c = preset("example1");
  c.mesh_n = 50;
  const Optimizer opt(c);
  OptState state = opt.initial_state();
  state.constraints.multipliers = {0.05, 0.0, -0.05, 0.0};
  double worst = 0.0;
  for (int p = 0; p < 10; ++p) {
    const GradientCheck g = directional_derivative(opt, state, p % 2, random_smooth_field(opt.mesh(), 77 + p), 1e-3);
    worst = std::max(worst, g.relative_error);
  }
  return {worst <= 0.05, format("10 directions at n=50, worst relative error %.2f%% (<= 5%%)", 100 * worst)};
}

struct PresetRun {
  RunHistory history;
  OptState final_state;
  double seconds = 0.0;
};

PresetRun run_preset(const std::string& name, const fs::path& out_dir) {
  const auto start = Clock::now();
  const Config c = preset(name);
  const Optimizer opt(c);
  fs::create_directories(out_dir / name);
  write_file_atomic((out_dir / name / "manifest.json").string(), format_manifest(c, 1, "acceptance"));
  OutputWriter writer(opt, (out_dir / name).string());
  RunResult r = opt.run(&writer);
  if (c.snapshot_every == 0 || r.final_state.iteration % c.snapshot_every != 0) writer.on_snapshot(r.final_state);
  PresetRun out{std::move(r.history), std::move(r.final_state), seconds_since(start)};
  const auto& last = out.history.records.back();
  std::printf("    %s: %d iterations in %.0f s, J %.4g -> %.4g, A=(%.4f, %.4f, %.4f), V1=%.4f V3=%.4f\n",
              name.c_str(), last.iteration, out.seconds, out.history.records.front().objective, last.objective,
              last.a1111, last.a1122, last.a2222, last.volumes[0], last.volumes[2]);
  std::fflush(stdout);
  return out;
}

Outcome monotone_descent(const std::map<std::string, PresetRun>& runs) {
  std::string detail;
  bool ok = true;
  for (const auto& [name, run] : runs) {
    const auto& rec = run.history.records;
    int increases = 0;
    for (std::size_t k = 1; k < rec.size(); ++k) increases += rec[k].objective > rec[k - 1].objective;
    const bool complete = rec.size() == 201;
    ok = ok && complete && increases == 0;
    detail += format("%s %zu rows, %d increases; ", name.c_str(), rec.size(), increases);
  }
  return {ok, detail};
}

Outcome example1_reproduction(const PresetRun& run) {
  const auto& last = run.history.records.back();
  const double nu = apparent_poisson(run.final_state.current.homogenized.tensor);
  const bool entries = std::abs(last.a1111 - 0.12) <= 0.05 && std::abs(last.a1122 + 0.09) <= 0.05 &&
                       std::abs(last.a2222 - 0.12) <= 0.05;
  const bool alternative = last.objective <= 0.002 && nu <= -0.7;
  return {(entries || alternative) && run.seconds <= 1800.0,
          format("A=(%.4f, %.4f, %.4f) vs (0.12, -0.09, 0.12) +-0.05: %s; J=%.3g, nu_app=%.3f; %.0f s (<= 1800 s)",
                 last.a1111, last.a1122, last.a2222, entries ? "within" : "outside", last.objective, nu,
                 run.seconds)};
}

Outcome volume_behavior(const std::map<std::string, PresetRun>& runs, const fs::path& out_dir) {
  bool ok = true;
  std::string detail;
  for (const char* name : {"example3", "example4"}) {
    const Config c = preset(name);
    // The history on disk is what the criterion inspects.
    const RunHistory h = read_history((out_dir / name / "history.csv").string());
    const auto& last = h.records.back();
    const double v1 = last.volumes[0], t1 = *c.volume_targets[0];
    const double v3 = last.volumes[2], t3 = *c.volume_targets[2];
    double peak3 = 0.0;
    for (const auto& r : h.records) peak3 = std::max(peak3, r.volumes[2]);
    const bool weak = std::abs(v1 - t1) <= 0.03 && last.iteration == 200 &&
                      h.records.size() == runs.at(name).history.records.size();
    ok = ok && weak;
    detail += format("%s V1=%.4f (target %.3f, |diff| %.4f <= 0.03), V3=%.4f (target %.4f, %s, peak %.4f); ", name,
                     v1, t1, std::abs(v1 - t1), v3, t3, v3 > t3 ? "overshoot" : "no overshoot", peak3);
  }
  return {ok, detail};
}

Outcome level_set_suite() {
  const auto start = Clock::now();
  int failures = 0;
  std::string detail;
  for (int n : {16, 50}) {
    const UnitCellMesh mesh = build_mesh(n);
    const double dx = mesh.dx();
    PatternSpec circle;
    circle.radius = 0.25;
    const NodalField exact = init_pattern(circle, mesh);

    // Redistancing an exact distance: band error; a steep copy: unit slope.
    const NodalField same = reinitialize(mesh, exact);
    double band = 0.0;
    for (int k = 0; k < exact.size(); ++k) {
      if (std::abs(exact[k]) <= 2 * dx) band = std::max(band, std::abs(same[k] - exact[k]));
    }
    const NodalField steep = reinitialize(mesh, 3.0 * exact);
    const NodalField slope = central_gradient_norm(mesh, steep);
    double slope_dev = 0.0;
    for (int k = 0; k < exact.size(); ++k) {
      const double r = mesh.dof_position(k).norm();
      if (std::abs(exact[k]) > 2 * dx && r > 0.1 && r < 0.4) slope_dev = std::max(slope_dev, std::abs(slope[k] - 1.0));
    }
    failures += !(band < 1e-3) + !(slope_dev <= 0.1);

    // Normal motion: radius along the x axis grows and shrinks by dt.
    auto radius = [&](const NodalField& phi) {
      const int j = n / 2;
      for (int i = n / 2; i < n - 1; ++i) {
        const double a = phi[mesh.grid_dof(i, j)], b = phi[mesh.grid_dof(i + 1, j)];
        if (a < 0.0 && b >= 0.0) return mesh.dof_position(mesh.grid_dof(i, j)).x() + dx * a / (a - b);
      }
      return -1.0;
    };
    const NodalField one = NodalField::Constant(exact.size(), 1.0);
    const double dt = cfl_timestep(one, dx);
    const double grow = radius(transport(mesh, exact, one, dt)) - radius(exact);
    const double shrink = radius(exact) - radius(transport(mesh, exact, -one, dt));
    const double motion = std::max(std::abs(grow - dt), std::abs(shrink - dt));
    failures += !(motion <= 0.2 * dx);

    // Partition of unity and transport monotonicity on random fields.
    PhaseSet phases = preset_phases(2 * dx);
    const NodalField a = random_level_set(mesh, 5), b = random_level_set(mesh, 6);
    double unity = 0.0;
    for (int k = 0; k < a.size(); ++k) {
      const auto iota = phase_densities(a[k], b[k], phases);
      unity = std::max(unity, std::abs(iota[0] + iota[1] + iota[2] + iota[3] - 1.0));
    }
    failures += !(unity <= 1e-14);
    const NodalField upper = a + 0.01 * (random_smooth_field(mesh, 9).array() + 1.0).matrix();
    const NodalField v = 0.5 * (random_smooth_field(mesh, 10).array() + 1.5).matrix();
    const double tv = cfl_timestep(v, dx);
    const bool monotone =
        ((transport(mesh, upper, v, tv) - transport(mesh, a, v, tv)).array() >= -1e-15).all() &&
        ((transport(mesh, upper, -v, tv) - transport(mesh, a, -v, tv)).array() >= -1e-15).all();
    failures += !monotone;
    detail += format("n=%d: reinit band %.1e, slope dev %.3f, motion err %.3f dx, unity %.0e, monotone %s; ", n, band,
                     slope_dev, motion / dx, unity, monotone ? "yes" : "no");
  }
  // Heaviside endpoints and monotonicity.
  const double eps = 0.02;
  bool heaviside_ok = heaviside(-eps, eps) == 0.0 && std::abs(heaviside(eps, eps) - 1.0) < 1e-15 &&
                      std::abs(heaviside(0.0, eps) - 0.5) < 1e-15;
  for (int k = -200; k < 200; ++k) heaviside_ok = heaviside_ok && heaviside((k + 1) * 1e-4, eps) >= heaviside(k * 1e-4, eps);
  failures += !heaviside_ok;
  const double t = seconds_since(start);
  detail += format("Heaviside %s; %.1f s (< 30 s)", heaviside_ok ? "ok" : "bad", t);
  return {failures == 0 && t < 30.0, detail};
}

bool same_history(const RunHistory& a, const RunHistory& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const auto& x = a.records[k];
    const auto& y = b.records[k];
    if (x.iteration != y.iteration || x.objective != y.objective || x.a1111 != y.a1111 || x.a1122 != y.a1122 ||
        x.a2222 != y.a2222 || x.a1212 != y.a1212 || x.volumes != y.volumes || x.multipliers != y.multipliers ||
        x.dt != y.dt || x.line_search_trials != y.line_search_trials || x.reinitialized != y.reinitialized ||
        x.stagnated != y.stagnated) {
      return false;
    }
  }
  return true;
}

Outcome determinism() {
  Config c = preset("example3");
  c.mesh_n = 32;
  c.iterations = 8;
  bool repeat = true;
  for (int threads : {1, 3}) {
    repeat = repeat && same_history(Optimizer(c, threads).run().history, Optimizer(c, threads).run().history);
  }
  const Optimizer opt(c);
  OptState state = opt.initial_state();
  for (int k = 0; k < 6; ++k) state = opt.step(state);
  const OptState restored = restore_state(opt, parse_state(format_state(c, state)));
  IterationRecord direct, resumed;
  const OptState a = opt.step(state, &direct);
  const OptState b = opt.step(restored, &resumed);
  RunHistory ha, hb;
  ha.records = {direct};
  hb.records = {resumed};
  const bool restart = same_history(ha, hb) && a.level_sets.phi[0] == b.level_sets.phi[0] &&
                       a.level_sets.phi[1] == b.level_sets.phi[1] && a.constraints.penalties == b.constraints.penalties;
  return {repeat && restart, format("repeat runs (1 and 3 threads) %s; state round-trip next iteration %s",
                                    repeat ? "bit-identical" : "differ", restart ? "bit-identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auxcell acceptance criteria"};
  std::string out_dir = "acceptance-runs";
  app.add_option("--out-dir", out_dir, "Directory for the preset runs");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s  criterion %d  %s: %s\n", o.passed ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "homogeneous cell", homogeneous_cell);
  report(2, "laminate oracle", laminate);
  report(3, "symmetry and bounds", symmetry_and_bounds);
  report(4, "gradient fidelity", gradient_fidelity);

  std::map<std::string, PresetRun> runs;
  std::string run_error;
  try {
    for (const auto& name : preset_names()) runs.emplace(name, run_preset(name, out_dir));
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto needs_runs = [&](std::function<Outcome()> check) {
    return [&, check]() -> Outcome {
      if (!run_error.empty()) return {false, "preset run failed: " + run_error};
      return check();
    };
  };
  report(5, "monotone descent", needs_runs([&] { return monotone_descent(runs); }));
  report(6, "example1 reproduction", needs_runs([&] { return example1_reproduction(runs.at("example1")); }));
  report(7, "examples 3-4 volume behavior", needs_runs([&] { return volume_behavior(runs, out_dir); }));
  report(8, "level-set suite", level_set_suite);
  report(9, "determinism and restart", determinism);

  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
