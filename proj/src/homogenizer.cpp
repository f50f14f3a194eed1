#include "auxcell/homogenizer.hpp"

#include <cmath>

#include <Eigen/LU>

#include "auxcell/error.hpp"

namespace auxcell {

Eigen::Matrix3d homogenized_matrix(const UnitCellMesh& mesh, const TensorField& field,
                                   const CellSolutions& solutions) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Eigen::Matrix3d strains = element_strains(mesh, solutions, e);
    sum += mesh.area(e) * (strains.transpose() * field[e].voigt() * strains);
  }
  return sum;
}

HomogenizedTensor homogenized_tensor(const UnitCellMesh& mesh, const TensorField& field,
                                     const CellSolutions& solutions) {
  return {ElasticTensor4(homogenized_matrix(mesh, field, solutions))};
}

Eigen::Matrix3d homogenized_tensor_unsymmetric(const UnitCellMesh& mesh, const TensorField& field,
                                               const CellSolutions& solutions) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Eigen::Matrix3d strains = element_strains(mesh, solutions, e);
    sum += mesh.area(e) * (field[e].voigt() * strains);
  }
  // Row = probe strain E^ml, column = corrected load case ij.
  return sum;
}

ElasticTensor4 voigt_average(const UnitCellMesh& mesh, const TensorField& field) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (int e = 0; e < mesh.element_count(); ++e) sum += mesh.area(e) * field[e].voigt();
  return ElasticTensor4(sum);
}

ElasticTensor4 reuss_average(const UnitCellMesh& mesh, const TensorField& field) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (int e = 0; e < mesh.element_count(); ++e) sum += mesh.area(e) * field[e].voigt().inverse();
  return ElasticTensor4(sum.inverse());
}

ObjectiveEntry ObjectiveEntry::parse(const std::string& label, double target, double weight) {
  if (label.size() != 4) throw ConfigError("objective entry '" + label + "' must have four indices");
  int idx[4];
  for (int p = 0; p < 4; ++p) {
    if (label[p] != '1' && label[p] != '2') {
      throw ConfigError("objective entry '" + label + "' may only use indices 1 and 2");
    }
    idx[p] = label[p] - '0';
  }
  ObjectiveEntry entry{idx[0], idx[1], idx[2], idx[3], target, weight};
  return entry;
}

std::string ObjectiveEntry::label() const {
  return std::string{static_cast<char>('0' + i), static_cast<char>('0' + j),
                     static_cast<char>('0' + k), static_cast<char>('0' + l)};
}

void ObjectiveSpec::validate() const {
  bool any_positive = false;
  for (const auto& e : entries) {
    if (!(e.weight >= 0.0)) throw ConfigError("objective weight for " + e.label() + " is negative");
    if (!std::isfinite(e.target)) throw ConfigError("objective target for " + e.label() + " is not finite");
    any_positive = any_positive || e.weight > 0.0;
  }
  if (!any_positive) throw ConfigError("objective needs at least one positive weight");
}

double objective(const ElasticTensor4& homogenized, const ObjectiveSpec& spec) {
  double j = 0.0;
  for (const auto& e : spec.entries) {
    const double diff = homogenized.at(e.i, e.j, e.k, e.l) - e.target;
    j += e.weight * diff * diff;
  }
  return 0.5 * j;
}

double apparent_poisson(const ElasticTensor4& homogenized) {
  const Eigen::Matrix3d& c = homogenized.voigt();
  const double scale = c.cwiseAbs().maxCoeff();
  const double det = c.determinant();
  if (scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale * scale) {
    throw DegenerateTensor("homogenized tensor is singular; apparent Poisson ratio undefined");
  }
  const Eigen::Matrix3d s = c.inverse();
  return -s(1, 0) / s(0, 0);
}

}  // namespace auxcell
