#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "auxcell/linear_solver.hpp"
#include "auxcell/material.hpp"
#include "auxcell/mesh.hpp"

namespace auxcell {

/// One elasticity tensor per element.
using TensorField = std::vector<ElasticTensor4>;

/// Evaluates the four-phase interpolation at every element barycenter.
TensorField material_field(const UnitCellMesh& mesh, const NodalField& d1, const NodalField& d2,
                           const PhaseSet& phases);

/// Order-sensitive 64-bit hash of the tensor values; identifies the material
/// a set of cell solutions was computed on.
std::uint64_t fingerprint(const TensorField& field);

/// Engineering strain of the unit load cases E^11, E^22, E^12, in that order.
inline Eigen::Vector3d unit_strain(int load_case) { return Eigen::Vector3d::Unit(load_case); }

/// Periodic correctors chi^11, chi^22, chi^12.
///
/// Each vector is interleaved (2 * periodic node + component) and has zero
/// mean over Y.
struct CellSolutions {
  std::array<Eigen::VectorXd, 3> chi;
  std::array<double, 3> residual{};
  std::array<int, 3> iterations{};
  std::uint64_t material_fingerprint = 0;
};

struct CellSolverOptions {
  double tolerance = 1e-9;
  /// <= 0 selects 10 * DOF.
  int max_iterations = 0;
  /// The three load cases run concurrently when > 1.
  int threads = 1;
};

/// Strain-displacement matrix of element e; local dof order (node, component).
Eigen::Matrix<double, 3, 6> strain_displacement(const UnitCellMesh& mesh, int e);

/// Total strains E^a + eps(chi^a) of element e; column a is load case a.
Eigen::Matrix3d element_strains(const UnitCellMesh& mesh, const CellSolutions& solutions, int e);

/// Reusable assembler: the sparsity pattern and scatter map are built once per mesh.
class CellSolver {
 public:
  explicit CellSolver(const UnitCellMesh& mesh);

  /// Stiffness on periodic DOFs. Throws IllPosedMaterial when an element
  /// tensor is not positive definite.
  SparseMatrix assemble(const TensorField& field) const;

  /// Right-hand sides -int A E^a : eps(w) of the three cell problems.
  std::array<Eigen::VectorXd, 3> loads(const TensorField& field) const;

  /// Solves the three cell problems on one assembled operator. A previous
  /// solution, when given, seeds the iterations.
  CellSolutions solve(const TensorField& field, const CellSolverOptions& options,
                      const CellSolutions* warm_start = nullptr) const;

  const UnitCellMesh& mesh() const { return *mesh_; }

 private:
  const UnitCellMesh* mesh_;
  SparseMatrix pattern_;
  std::vector<std::array<int, 36>> scatter_;
  std::vector<Eigen::Matrix<double, 3, 6>> b_matrices_;
};

SparseMatrix assemble_stiffness(const UnitCellMesh& mesh, const TensorField& field);

CellSolutions solve_cell_problems(const UnitCellMesh& mesh, const TensorField& field,
                                  const CellSolverOptions& options = {});

}  // namespace auxcell
