#pragma once

#include <array>
#include <vector>

#include "auxcell/config.hpp"
#include "auxcell/evaluation.hpp"
#include "auxcell/level_set.hpp"
#include "auxcell/shape_gradient.hpp"

namespace auxcell {

/// One row of the convergence history.
struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double a1111 = 0.0, a1122 = 0.0, a2222 = 0.0, a1212 = 0.0;
  std::array<double, 4> volumes{};
  std::array<double, 4> multipliers{};
  /// Accepted pseudo-time step (0 when the design did not move).
  double dt = 0.0;
  /// Forward solves spent by the line search.
  int line_search_trials = 0;
  bool reinitialized = false;
  bool stagnated = false;
};

struct RunHistory {
  std::vector<IterationRecord> records;
};

struct OptState {
  MultiLevelSet level_sets;
  ConstraintState constraints;
  Evaluation current;
  int iteration = 0;
  int consecutive_failures = 0;
  bool stagnated = false;
};

/// Receives history rows and snapshots while `Optimizer::run` progresses.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_record(const IterationRecord& /*record*/, const OptState& /*state*/) {}
  virtual void on_snapshot(const OptState& /*state*/) {}
};

struct RunResult {
  RunHistory history;
  OptState final_state;
};

/// Level-set descent on the homogenized-tensor mismatch.
///
/// Each step solves the cell problems, builds extended velocities for both
/// level sets and backtracks the Hamilton-Jacobi step from the CFL limit
/// until J does not increase. Reinitialization is attempted every
/// `reinit_every` iterations and kept only when it does not raise J.
class Optimizer {
 public:
  explicit Optimizer(Config config, int threads = 1);
  Optimizer(const Optimizer&) = delete;
  Optimizer& operator=(const Optimizer&) = delete;

  const Config& config() const { return config_; }
  const UnitCellMesh& mesh() const { return mesh_; }
  const PhaseSet& phases() const { return phases_; }
  const CellSolver& solver() const { return solver_; }
  CellSolverOptions solver_options() const;

  /// Initial level sets (reinitialized), their evaluation and zero multipliers.
  OptState initial_state() const;

  /// Rebuilds a state from stored level sets and correctors without re-solving.
  OptState restore(const MultiLevelSet& sets, const ConstraintState& constraints,
                   const CellSolutions& solutions, int iteration, int consecutive_failures,
                   bool stagnated) const;

  Evaluation evaluate(const MultiLevelSet& sets, const CellSolutions* warm_start) const;

  /// One outer iteration. `record`, when given, receives the history row.
  OptState step(const OptState& state, IterationRecord* record = nullptr) const;

  /// Runs exactly config().iterations steps from the initial state.
  RunResult run(RunObserver* observer = nullptr) const;
  /// Continues from `state` until config().iterations is reached.
  RunResult resume(OptState state, RunObserver* observer = nullptr) const;

  IterationRecord make_record(const OptState& state, double dt, int trials, bool reinitialized) const;

 private:
  Config config_;
  int threads_;
  UnitCellMesh mesh_;
  PhaseSet phases_;
  CellSolver solver_;
  VelocityExtender extender_;
};

}  // namespace auxcell
