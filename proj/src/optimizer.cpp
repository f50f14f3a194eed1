#include "auxcell/optimizer.hpp"

#include <algorithm>
#include <utility>

#include "auxcell/error.hpp"

namespace auxcell {

Optimizer::Optimizer(Config config, int threads)
    : config_((config.validate(), std::move(config))),
      threads_(std::max(1, threads)),
      mesh_(build_mesh(config_.mesh_n)),
      phases_(config_.phase_set()),
      solver_(mesh_),
      extender_(mesh_, config_.numerics.alpha_factor * mesh_.dx()) {}

CellSolverOptions Optimizer::solver_options() const {
  CellSolverOptions options;
  options.tolerance = config_.numerics.cg_tolerance;
  options.max_iterations = config_.numerics.cg_max_iterations;
  options.threads = threads_;
  return options;
}

Evaluation Optimizer::evaluate(const MultiLevelSet& sets, const CellSolutions* warm_start) const {
  return auxcell::evaluate(solver_, sets.phi[0], sets.phi[1], phases_, config_.objective,
                           solver_options(), warm_start);
}

OptState Optimizer::initial_state() const {
  OptState state;
  for (int i = 0; i < 2; ++i) {
    NodalField phi = init_pattern(config_.init[i], mesh_, config_.seed + static_cast<std::uint64_t>(i));
    if (has_interface(phi)) phi = reinitialize(mesh_, phi, config_.numerics.reinit_steps);
    state.level_sets.phi[i] = std::move(phi);
  }
  state.current = evaluate(state.level_sets, nullptr);
  state.constraints = initial_constraints(config_.mode, config_.constraint);
  state.constraints.volumes = state.current.volumes;
  return state;
}

OptState Optimizer::restore(const MultiLevelSet& sets, const ConstraintState& constraints,
                            const CellSolutions& solutions, int iteration, int consecutive_failures,
                            bool stagnated) const {
  OptState state;
  state.level_sets = sets;
  state.constraints = constraints;
  state.iteration = iteration;
  state.consecutive_failures = consecutive_failures;
  state.stagnated = stagnated;
  Evaluation& eval = state.current;
  eval.field = material_field(mesh_, sets.phi[0], sets.phi[1], phases_);
  eval.solutions = solutions;
  eval.solutions.material_fingerprint = fingerprint(eval.field);
  eval.homogenized = homogenized_tensor(mesh_, eval.field, eval.solutions);
  eval.objective = objective(eval.homogenized.tensor, config_.objective);
  eval.volumes = phase_volumes(mesh_, sets.phi[0], sets.phi[1], phases_);
  return state;
}

IterationRecord Optimizer::make_record(const OptState& state, double dt, int trials,
                                       bool reinitialized) const {
  IterationRecord r;
  r.iteration = state.iteration;
  r.objective = state.current.objective;
  r.a1111 = state.current.homogenized.a1111();
  r.a1122 = state.current.homogenized.a1122();
  r.a2222 = state.current.homogenized.a2222();
  r.a1212 = state.current.homogenized.a1212();
  r.volumes = state.current.volumes;
  r.multipliers = state.constraints.multipliers;
  r.dt = dt;
  r.line_search_trials = trials;
  r.reinitialized = reinitialized;
  r.stagnated = state.stagnated;
  return r;
}

OptState Optimizer::step(const OptState& state, IterationRecord* record) const {
  const auto& num = config_.numerics;
  const double j_prev = state.current.objective;
  OptState base = state;
  base.constraints.volumes = base.current.volumes;

  // Periodic redistancing, kept only if it does not raise J.
  bool reinitialized = false;
  if (num.reinit_every > 0) {
    MultiLevelSet candidate = base.level_sets;
    bool due = false;
    for (int i = 0; i < 2; ++i) {
      if (candidate.since_reinit[i] >= num.reinit_every) {
        candidate.since_reinit[i] = 0;
        base.level_sets.since_reinit[i] = 0;
        if (has_interface(candidate.phi[i])) {
          candidate.phi[i] = reinitialize(mesh_, candidate.phi[i], num.reinit_steps);
          due = true;
        }
      }
    }
    if (due) {
      Evaluation eval = evaluate(candidate, &base.current.solutions);
      if (eval.objective <= j_prev) {
        base.level_sets = std::move(candidate);
        base.current = std::move(eval);
        base.constraints.volumes = base.current.volumes;
        reinitialized = true;
      }
    }
  }

  const VelocityPair velocity = descent_velocities(mesh_, extender_, base.level_sets, base.current,
                                                   config_.objective, base.constraints, phases_,
                                                   num.descent_safeguard);
  const double vmax = std::max(velocity.max_abs[0], velocity.max_abs[1]);

  OptState next = base;
  double accepted_dt = 0.0;
  int trials = 0;
  bool moved = false;
  if (vmax > 0.0) {
    const double dt0 = 0.5 * mesh_.dx() / vmax;
    auto attempt = [&](double dt) {
      MultiLevelSet trial = base.level_sets;
      for (int i = 0; i < 2; ++i) trial.phi[i] = transport(mesh_, base.level_sets.phi[i], velocity.v[i], dt);
      Evaluation eval = evaluate(trial, &base.current.solutions);
      ++trials;
      if (eval.objective <= j_prev) {
        next.level_sets.phi = std::move(trial.phi);
        next.current = std::move(eval);
        accepted_dt = dt;
        return true;
      }
      return false;
    };
    double dt = dt0;
    for (int t = 0; t < num.line_search_trials && !moved; ++t) {
      moved = attempt(dt);
      dt *= num.line_search_shrink;
    }
    if (!moved && num.fallback_step > 0.0) moved = attempt(num.fallback_step * dt0);
    if (moved) {
      next.consecutive_failures = 0;
    } else {
      next.consecutive_failures = base.consecutive_failures + 1;
      if (next.consecutive_failures >= num.stagnation_limit) next.stagnated = true;
    }
  }

  for (int i = 0; i < 2; ++i) ++next.level_sets.since_reinit[i];
  next.constraints = multiplier_update(base.constraints, next.current.volumes, phases_, config_.constraint);
  next.iteration = state.iteration + 1;
  if (record != nullptr) *record = make_record(next, accepted_dt, trials, reinitialized);
  return next;
}

RunResult Optimizer::run(RunObserver* observer) const { return resume(initial_state(), observer); }

RunResult Optimizer::resume(OptState state, RunObserver* observer) const {
  RunResult result;
  const IterationRecord first = make_record(state, 0.0, 0, false);
  result.history.records.push_back(first);
  if (observer != nullptr) {
    observer->on_record(first, state);
    observer->on_snapshot(state);
  }
  while (state.iteration < config_.iterations) {
    IterationRecord record;
    state = step(state, &record);
    result.history.records.push_back(record);
    if (observer != nullptr) {
      observer->on_record(record, state);
      if (config_.snapshot_every > 0 && state.iteration % config_.snapshot_every == 0) {
        observer->on_snapshot(state);
      }
    }
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace auxcell
