#include "auxcell/shape_gradient.hpp"

#include <algorithm>
#include <cmath>

#include "auxcell/error.hpp"

namespace auxcell {

ConstraintState initial_constraints(ConstraintMode mode, const ConstraintParams& params) {
  ConstraintState state;
  state.mode = mode;
  if (mode == ConstraintMode::Augmented) state.penalties.fill(params.beta0);
  return state;
}

std::array<double, 4> effective_multipliers(const ConstraintState& state, const PhaseSet& phases) {
  std::array<double, 4> l{};
  for (int k = 0; k < 4; ++k) {
    if (!phases.constrained[k]) continue;
    l[k] = state.multipliers[k];
    if (state.mode == ConstraintMode::Augmented) {
      l[k] -= state.penalties[k] * (state.volumes[k] - phases.volume_targets[k]);
    }
  }
  return l;
}

ConstraintState multiplier_update(const ConstraintState& state, const std::array<double, 4>& volumes,
                                  const PhaseSet& phases, const ConstraintParams& params) {
  ConstraintState next = state;
  next.volumes = volumes;
  next.updates = state.updates + 1;
  for (int k = 0; k < 4; ++k) {
    if (!phases.constrained[k]) continue;
    const double violation = volumes[k] - phases.volume_targets[k];
    const double step = state.mode == ConstraintMode::Augmented ? state.penalties[k] : params.beta_step;
    next.multipliers[k] = state.multipliers[k] - step * violation;
  }
  if (state.mode == ConstraintMode::Augmented && params.beta_update_every > 0 &&
      next.updates % params.beta_update_every == 0) {
    for (auto& beta : next.penalties) beta = std::min(params.gamma * beta, params.beta_max);
  }
  return next;
}

NodalField constraint_terms(int i, const MultiLevelSet& sets, const ConstraintState& state,
                            const PhaseSet& phases) {
  const auto l = effective_multipliers(state, phases);
  const NodalField& other = sets.phi[1 - i];
  NodalField out(other.size());
  for (Eigen::Index k = 0; k < other.size(); ++k) out[k] = -h_star(i, other[k], l, phases.epsilon);
  return out;
}

namespace {

// Objective and constraint parts of the element density s_e.
void sensitivity_parts(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets, const Evaluation& eval,
                       const ObjectiveSpec& spec, const ConstraintState& constraints, const PhaseSet& phases,
                       ElementField& objective_part, ElementField& constraint_part) {
  if (i != 0 && i != 1) throw ConfigError("level-set index must be 0 or 1");
  if (fingerprint(material_field(mesh, sets.phi[0], sets.phi[1], phases)) !=
      eval.solutions.material_fingerprint) {
    throw StaleSolution("cell solutions were computed on a different material field");
  }
  const ElementField other = mesh.element_average(sets.phi[1 - i]);
  const auto l = effective_multipliers(constraints, phases);

  // Objective prefactors eta (A^H - A^t) per Voigt pair.
  struct Term {
    int a, b;
    double factor;
  };
  std::vector<Term> terms;
  for (const auto& entry : spec.entries) {
    if (entry.weight == 0.0) continue;
    const double mismatch = eval.homogenized.tensor.at(entry.i, entry.j, entry.k, entry.l) - entry.target;
    terms.push_back({voigt_index(entry.i, entry.j), voigt_index(entry.k, entry.l), entry.weight * mismatch});
  }

  objective_part.setZero(mesh.element_count());
  constraint_part.resize(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (!terms.empty()) {
      const Eigen::Matrix3d strains = element_strains(mesh, eval.solutions, e);
      const Eigen::Matrix3d coupled = strains.transpose() * a_star(i, other[e], phases).voigt() * strains;
      double g = 0.0;
      for (const auto& t : terms) g += t.factor * coupled(t.a, t.b);
      objective_part[e] = g;
    }
    constraint_part[e] = -h_star(i, other[e], l, phases.epsilon);
  }
}

NodalField nodal_gradient(const UnitCellMesh& mesh, const ElementField& s, const NodalField& phi, double eps) {
  const ElementField d = mesh.element_average(phi);
  NodalField grad = NodalField::Zero(mesh.periodic_node_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double contribution = mesh.area(e) / 3.0 * s[e] * heaviside_derivative(d[e], eps);
    for (int dof : mesh.element(e).dofs) grad[dof] += contribution;
  }
  return grad;
}

}  // namespace

ElementField sensitivity_density(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets,
                                 const Evaluation& eval, const ObjectiveSpec& spec,
                                 const ConstraintState& constraints, const PhaseSet& phases) {
  ElementField objective_part, constraint_part;
  sensitivity_parts(i, mesh, sets, eval, spec, constraints, phases, objective_part, constraint_part);
  return objective_part + constraint_part;
}

NodalField velocity_integrand(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets,
                              const Evaluation& eval, const ObjectiveSpec& spec,
                              const ConstraintState& constraints, const PhaseSet& phases) {
  return -mesh.nodal_average(sensitivity_density(i, mesh, sets, eval, spec, constraints, phases));
}

NodalField lagrangian_gradient(int i, const UnitCellMesh& mesh, const MultiLevelSet& sets,
                               const Evaluation& eval, const ObjectiveSpec& spec,
                               const ConstraintState& constraints, const PhaseSet& phases) {
  return nodal_gradient(mesh, sensitivity_density(i, mesh, sets, eval, spec, constraints, phases), sets.phi[i],
                        phases.epsilon);
}

NodalField band_load(const UnitCellMesh& mesh, const ElementField& density, const NodalField& d,
                     double eps) {
  NodalField load = NodalField::Zero(mesh.periodic_node_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& dofs = mesh.element(e).dofs;
    const double de = (d[dofs[0]] + d[dofs[1]] + d[dofs[2]]) / 3.0;
    const double weight = heaviside_derivative(de, eps);
    if (weight == 0.0) continue;
    const auto& g = mesh.shape_gradients(e);
    const Eigen::Vector2d grad = g.col(0) * d[dofs[0]] + g.col(1) * d[dofs[1]] + g.col(2) * d[dofs[2]];
    const double contribution = mesh.area(e) / 3.0 * density[e] * weight * grad.norm();
    for (int dof : dofs) load[dof] += contribution;
  }
  return load;
}

VelocityExtender::VelocityExtender(const UnitCellMesh& mesh, double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0)) throw ConfigError("velocity regularization length alpha must be positive");
  const int count = mesh.periodic_node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.element_count() + count);
  const double a2 = alpha * alpha;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& g = mesh.shape_gradients(e);
    const Eigen::Matrix3d ke = a2 * mesh.area(e) * (g.transpose() * g);
    const auto& dofs = mesh.element(e).dofs;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) triplets.emplace_back(dofs[r], dofs[c], ke(r, c));
    }
  }
  for (int k = 0; k < count; ++k) triplets.emplace_back(k, k, mesh.lumped_mass()[k]);
  op_.resize(count, count);
  op_.setFromTriplets(triplets.begin(), triplets.end());
  op_.makeCompressed();
}

NodalField VelocityExtender::solve(const NodalField& load, const CgOptions& options) const {
  NodalField theta = NodalField::Zero(load.size());
  if (load.norm() == 0.0) return theta;
  conjugate_gradient(op_, load, theta, options);
  return theta;
}

NodalField extend_velocity(const UnitCellMesh& mesh, const NodalField& v_raw, const NodalField& d,
                           double alpha, double eps) {
  const ElementField density = mesh.element_average(v_raw);
  return VelocityExtender(mesh, alpha).solve(band_load(mesh, density, d, eps));
}

VelocityPair descent_velocities(const UnitCellMesh& mesh, const VelocityExtender& extender,
                                const MultiLevelSet& sets, const Evaluation& eval,
                                const ObjectiveSpec& spec, const ConstraintState& constraints,
                                const PhaseSet& phases, bool safeguard) {
  // Outward normal speed s decreases the Lagrangian to first order. The
  // objective and constraint parts are extended separately so the part of the
  // constraint velocity that would raise J can be projected out.
  std::array<NodalField, 2> v_obj, v_con, a, w;
  double slope_con = 0.0, aw = 0.0;
  for (int i = 0; i < 2; ++i) {
    ElementField s_obj, s_con;
    sensitivity_parts(i, mesh, sets, eval, spec, constraints, phases, s_obj, s_con);
    v_obj[i] = extender.solve(band_load(mesh, s_obj, sets.phi[i], phases.epsilon));
    v_con[i] = extender.solve(band_load(mesh, s_con, sets.phi[i], phases.epsilon));
    if (safeguard) {
      // J changes by -a . v to first order under phi_i -> phi_i - t v |grad phi_i|.
      a[i] = nodal_gradient(mesh, s_obj, sets.phi[i], phases.epsilon)
                 .cwiseProduct(central_gradient_norm(mesh, sets.phi[i]));
      w[i] = extender.solve(a[i]);
      slope_con -= a[i].dot(v_con[i]);
      aw += a[i].dot(w[i]);
    }
  }
  VelocityPair out;
  if (safeguard && slope_con > 0.0 && aw > 0.0) {
    // Remove the smoothed J-gradient component so a . v_con = 0.
    out.projection = slope_con / aw;
  }
  for (int i = 0; i < 2; ++i) {
    out.v[i] = v_obj[i] + v_con[i];
    if (out.projection != 0.0) out.v[i] += out.projection * w[i];
    out.max_abs[i] = out.v[i].size() > 0 ? out.v[i].cwiseAbs().maxCoeff() : 0.0;
  }
  return out;
}

}  // namespace auxcell
