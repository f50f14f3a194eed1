#include "auxcell/evaluation.hpp"

namespace auxcell {

std::array<double, 4> phase_volumes(const UnitCellMesh& mesh, const NodalField& d1,
                                    const NodalField& d2, const PhaseSet& phases) {
  const ElementField e1 = mesh.element_average(d1);
  const ElementField e2 = mesh.element_average(d2);
  std::array<double, 4> volumes{};
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto iota = phase_densities(e1[e], e2[e], phases);
    for (int k = 0; k < 4; ++k) volumes[k] += mesh.area(e) * iota[k];
  }
  return volumes;
}

Evaluation evaluate(const CellSolver& solver, const NodalField& d1, const NodalField& d2,
                    const PhaseSet& phases, const ObjectiveSpec& spec,
                    const CellSolverOptions& options, const CellSolutions* warm_start) {
  const auto& mesh = solver.mesh();
  Evaluation out;
  out.field = material_field(mesh, d1, d2, phases);
  out.solutions = solver.solve(out.field, options, warm_start);
  out.homogenized = homogenized_tensor(mesh, out.field, out.solutions);
  out.objective = objective(out.homogenized.tensor, spec);
  out.volumes = phase_volumes(mesh, d1, d2, phases);
  return out;
}

}  // namespace auxcell
