#pragma once

#include <array>

#include "auxcell/cell_solver.hpp"
#include "auxcell/homogenizer.hpp"

namespace auxcell {

/// Everything the forward problem produces for one pair of level sets.
struct Evaluation {
  TensorField field;
  CellSolutions solutions;
  HomogenizedTensor homogenized;
  double objective = 0.0;
  /// V_k = int iota_k over Y (barycentric quadrature); sums to one.
  std::array<double, 4> volumes{};
};

/// Phase volumes with the same element quadrature as the material field.
std::array<double, 4> phase_volumes(const UnitCellMesh& mesh, const NodalField& d1,
                                    const NodalField& d2, const PhaseSet& phases);

/// Material field, cell problems, A^H, J and volumes for (d1, d2).
Evaluation evaluate(const CellSolver& solver, const NodalField& d1, const NodalField& d2,
                    const PhaseSet& phases, const ObjectiveSpec& spec,
                    const CellSolverOptions& options, const CellSolutions* warm_start = nullptr);

}  // namespace auxcell
