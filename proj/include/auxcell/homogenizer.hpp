#pragma once

#include <string>
#include <vector>

#include "auxcell/cell_solver.hpp"
#include "auxcell/material.hpp"
#include "auxcell/mesh.hpp"

namespace auxcell {

struct HomogenizedTensor {
  ElasticTensor4 tensor;

  double a1111() const { return tensor.at(1, 1, 1, 1); }
  double a1122() const { return tensor.at(1, 1, 2, 2); }
  double a2222() const { return tensor.at(2, 2, 2, 2); }
  double a1212() const { return tensor.at(1, 2, 1, 2); }
};

/// Energy form int A (E^ij + eps(chi^ij)) : (E^ml + eps(chi^ml)); |Y| = 1.
HomogenizedTensor homogenized_tensor(const UnitCellMesh& mesh, const TensorField& field,
                                     const CellSolutions& solutions);

/// Raw Voigt matrix of the energy form before symmetrization.
Eigen::Matrix3d homogenized_matrix(const UnitCellMesh& mesh, const TensorField& field,
                                   const CellSolutions& solutions);

/// One-sided form int A (E^ij + eps(chi^ij)) : E^ml. Equal to the energy form
/// at the discrete solution; used as a cross-check.
Eigen::Matrix3d homogenized_tensor_unsymmetric(const UnitCellMesh& mesh, const TensorField& field,
                                               const CellSolutions& solutions);

/// Volume average of the element tensors (Voigt bound).
ElasticTensor4 voigt_average(const UnitCellMesh& mesh, const TensorField& field);
/// Inverse of the volume-averaged compliance (Reuss bound).
ElasticTensor4 reuss_average(const UnitCellMesh& mesh, const TensorField& field);

/// One weighted entry of the target tensor, e.g. 1122 with its target and weight.
struct ObjectiveEntry {
  int i = 1, j = 1, k = 1, l = 1;
  double target = 0.0;
  double weight = 0.0;

  /// Parses "1122"-style labels; throws ConfigError.
  static ObjectiveEntry parse(const std::string& label, double target, double weight);
  std::string label() const;
};

/// Weighted least-squares target; unlisted entries carry weight zero.
struct ObjectiveSpec {
  std::vector<ObjectiveEntry> entries;
  void validate() const;
};

/// J = 1/2 sum_entries weight (A^H - A^t)^2, each listed entry counted once.
double objective(const ElasticTensor4& homogenized, const ObjectiveSpec& spec);

/// -S_2211 / S_1111 of the compliance S = A^-1. Throws DegenerateTensor.
double apparent_poisson(const ElasticTensor4& homogenized);

}  // namespace auxcell
