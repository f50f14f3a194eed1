#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "auxcell/config.hpp"
#include "auxcell/error.hpp"
#include "auxcell/io.hpp"
#include "auxcell/optimizer.hpp"
#include "auxcell/validation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace auxcell;

struct Common {
  std::string config_path;
  std::string preset_name;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("config,--config", common.config_path, "Configuration file (JSON)");
  cmd->add_option("--preset", common.preset_name, "Built-in preset (example1 .. example4)");
  cmd->add_option("--threads", common.threads, "Worker threads for the cell solves")
      ->envname("AUXCELL_THREADS")
      ->check(CLI::PositiveNumber);
}

Config resolve(const Common& common) {
  if (!common.config_path.empty() && !common.preset_name.empty()) {
    throw ConfigError("give either a config file or --preset, not both");
  }
  if (!common.config_path.empty()) return load_config(common.config_path);
  return preset(common.preset_name.empty() ? "example1" : common.preset_name);
}

void print_tensor(const HomogenizedTensor& ah) {
  std::printf("A1111=%.6f\nA1122=%.6f\nA2222=%.6f\nA1212=%.6f\n", ah.a1111(), ah.a1122(), ah.a2222(),
              ah.a1212());
}

int run_homogenize(const Common& common) {
  const Config config = resolve(common);
  const Optimizer opt(config, common.threads);
  const OptState state = opt.initial_state();
  const auto& eval = state.current;
  print_tensor(eval.homogenized);
  try {
    std::printf("nu_app=%.6f\n", apparent_poisson(eval.homogenized.tensor));
  } catch (const DegenerateTensor& e) {
    std::printf("nu_app=undefined (%s)\n", e.what());
  }
  std::printf("J=%.9g\n", eval.objective);
  std::printf("V=%.6f,%.6f,%.6f,%.6f\n", eval.volumes[0], eval.volumes[1], eval.volumes[2], eval.volumes[3]);
  std::printf("cg_iterations=%d,%d,%d\n", eval.solutions.iterations[0], eval.solutions.iterations[1],
              eval.solutions.iterations[2]);
  return 0;
}

int run_optimize(const Common& common, const std::string& out_dir, const std::string& resume_path) {
  fs::create_directories(out_dir);
  if (!resume_path.empty()) {
    const StoredState stored = load_state(resume_path);
    const Optimizer opt(stored.config, common.threads);
    write_file_atomic((fs::path(out_dir) / "manifest.json").string(),
                      format_manifest(stored.config, common.threads, "optimize --resume " + resume_path));
    OutputWriter writer(opt, out_dir, stored.iteration);
    const RunResult result = opt.resume(restore_state(opt, stored), &writer);
    const auto& last = result.history.records.back();
    std::printf("iteration %d  J=%.9g  A=(%.6f, %.6f, %.6f)\n", last.iteration, last.objective, last.a1111,
                last.a1122, last.a2222);
    return 0;
  }
  const Config config = resolve(common);
  const Optimizer opt(config, common.threads);
  write_file_atomic((fs::path(out_dir) / "manifest.json").string(),
                    format_manifest(config, common.threads, "optimize"));
  OutputWriter writer(opt, out_dir);
  const RunResult result = opt.run(&writer);
  const OptState& final_state = result.final_state;
  if (config.snapshot_every == 0 || final_state.iteration % config.snapshot_every != 0) {
    writer.on_snapshot(final_state);
  }
  const auto& last = result.history.records.back();
  std::printf("iteration %d  J=%.9g  A=(%.6f, %.6f, %.6f)", last.iteration, last.objective, last.a1111, last.a1122,
              last.a2222);
  try {
    std::printf("  nu_app=%.4f", apparent_poisson(final_state.current.homogenized.tensor));
  } catch (const DegenerateTensor&) {
  }
  std::printf("\n");
  return 0;
}

int run_validate(const Common& common) {
  const Config config = resolve(common);
  bool ok = true;
  for (const auto& r : run_validation(config, common.threads)) {
    std::printf("%s  %s: %.3e (tolerance %.1e)  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value,
                r.tolerance, r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auxcell: four-phase inverse homogenization with two level sets"};
  app.require_subcommand(1);

  Common optimize_opts, homogenize_opts, validate_opts;
  std::string out_dir = "auxcell-out";
  std::string resume_path;

  auto* optimize = app.add_subcommand("optimize", "Run the shape optimization");
  add_common(optimize, optimize_opts);
  optimize->add_option("--out-dir", out_dir, "Directory for manifest, history and snapshots");
  optimize->add_option("--resume", resume_path, "Continue from a saved state.json");

  auto* homogenize = app.add_subcommand("homogenize", "Solve the cell problems once and print A^H");
  add_common(homogenize, homogenize_opts);

  auto* validate = app.add_subcommand("validate", "Run the oracle and invariant checks");
  add_common(validate, validate_opts);

  app.add_subcommand("presets", "List the built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*optimize) return run_optimize(optimize_opts, out_dir, resume_path);
    if (*homogenize) return run_homogenize(homogenize_opts);
    if (*validate) return run_validate(validate_opts);
    for (const auto& name : preset_names()) std::printf("%s  %s\n", name.c_str(), preset_summary(name).c_str());
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "auxcell: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "auxcell: %s\n", e.what());
    return 1;
  }
}
