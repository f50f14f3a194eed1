#pragma once

#include <array>

#include "auxcell/evaluation.hpp"
#include "auxcell/level_set.hpp"
#include "auxcell/linear_solver.hpp"

namespace auxcell {

enum class ConstraintMode { Plain, Augmented };

struct ConstraintParams {
  /// Multiplier step of the plain update l <- l - beta_step (V - V^t).
  double beta_step = 0.1;
  /// Initial augmented-Lagrangian penalty.
  double beta0 = 1.0;
  /// Penalty growth factor applied every `beta_update_every` updates.
  double gamma = 1.5;
  int beta_update_every = 5;
  /// Upper bound on the penalties.
  double beta_max = 100.0;
};

/// Multipliers l_k, penalties beta_k and the last measured volumes.
struct ConstraintState {
  ConstraintMode mode = ConstraintMode::Plain;
  std::array<double, 4> multipliers{};
  std::array<double, 4> penalties{};
  std::array<double, 4> volumes{};
  /// Number of multiplier updates performed so far.
  int updates = 0;
};

ConstraintState initial_constraints(ConstraintMode mode, const ConstraintParams& params);

/// Multipliers that enter the shape derivative: l in plain mode, l - beta C in
/// augmented mode (C = V - V^t). Unconstrained phases contribute zero.
std::array<double, 4> effective_multipliers(const ConstraintState& state, const PhaseSet& phases);

/// l <- l - step (V - V^t) on constrained phases, with step = beta_step in plain
/// mode and beta_k in augmented mode; augmented penalties grow by gamma every
/// beta_update_every updates (capped at beta_max).
ConstraintState multiplier_update(const ConstraintState& state, const std::array<double, 4>& volumes,
                                  const PhaseSet& phases, const ConstraintParams& params);

/// Nodal constraint contribution -h*(d_other) of level set `i` (0 or 1).
NodalField constraint_terms(int i, const MultiLevelSet& sets, const ConstraintState& state,
                            const PhaseSet& phases);

/// Element density s_e of the Lagrangian derivative with respect to d_i:
///
///   s = eta (A^H - A^t) A*(d_other) e^kl . e^ij - h*(d_other)
///
/// so that dL/dd_i = s h'(d_i) pointwise and moving the boundary outward with
/// normal speed v changes L by -int s v h'(d_i) |grad d_i|. Throws
/// StaleSolution if `eval` was not computed on these level sets.
ElementField sensitivity_density(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets,
                                 const Evaluation& eval, const ObjectiveSpec& spec,
                                 const ConstraintState& constraints, const PhaseSet& phases);

/// Nodal shape-gradient density g_i = -s (area-averaged to nodes): the
/// derivative for a normal displacement theta.n is int theta.n g_i over the
/// interface band. The descent velocity is -g_i.
NodalField velocity_integrand(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets,
                              const Evaluation& eval, const ObjectiveSpec& spec,
                              const ConstraintState& constraints, const PhaseSet& phases);

/// Exact derivative of the discrete Lagrangian with respect to the nodal
/// values of phi_i.
NodalField lagrangian_gradient(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets,
                               const Evaluation& eval, const ObjectiveSpec& spec,
                               const ConstraintState& constraints, const PhaseSet& phases);

/// Nodal load int v w h'(d) |grad d| of an element-wise density v.
NodalField band_load(const UnitCellMesh& mesh, const ElementField& density, const NodalField& d,
                     double eps);

/// Periodic Helmholtz smoother (alpha^2 K + M) theta = load with P1 stiffness
/// and lumped mass.
class VelocityExtender {
 public:
  VelocityExtender(const UnitCellMesh& mesh, double alpha);
  NodalField solve(const NodalField& load, const CgOptions& options = {1e-10, 0}) const;
  double alpha() const { return alpha_; }

 private:
  SparseMatrix op_;
  double alpha_;
};

/// Extends and regularizes a nodal velocity living on the interface band of d
/// over Y: int alpha^2 grad theta . grad w + theta w = int v w h'(d) |grad d|.
NodalField extend_velocity(const UnitCellMesh& mesh, const NodalField& v_raw, const NodalField& d,
                           double alpha, double eps);

struct VelocityPair {
  std::array<NodalField, 2> v;
  std::array<double, 2> max_abs{};
  /// Multiple of the smoothed J-gradient direction added to cancel the
  /// first-order J increase of the constraint part (0 = none needed).
  double projection = 0.0;
};

/// Extended descent velocities for both level sets.
///
/// With `safeguard`, whenever the constraint part would raise J to first
/// order, its component along the smoothed J-gradient direction is removed, so
/// the combined velocity decreases J exactly as fast as the objective part
/// alone while the volumes still move toward their targets.
VelocityPair descent_velocities(const UnitCellMesh& mesh, const VelocityExtender& extender,
                                const MultiLevelSet& sets, const Evaluation& eval,
                                const ObjectiveSpec& spec, const ConstraintState& constraints,
                                const PhaseSet& phases, bool safeguard = true);

}  // namespace auxcell
