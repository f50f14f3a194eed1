#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "auxcell/error.hpp"
#include "auxcell/evaluation.hpp"
#include "auxcell/homogenizer.hpp"

using namespace auxcell;

namespace {

ElasticTensor4 tensor_from(double a1111, double a1122, double a2222, double a1212) {
  Eigen::Matrix3d c;
  c << a1111, a1122, 0, a1122, a2222, 0, 0, 0, a1212;
  return ElasticTensor4(c);
}

ObjectiveSpec example1_objective(double scale = 1.0) {
  ObjectiveSpec spec;
  spec.entries = {ObjectiveEntry::parse("1111", 0.1, scale * 1.0), ObjectiveEntry::parse("1122", -0.1, scale * 30.0),
                  ObjectiveEntry::parse("2222", 0.1, scale * 1.0)};
  return spec;
}

}  // namespace

TEST_CASE("objective values") {
  const ObjectiveSpec spec = example1_objective();
  CHECK(objective(tensor_from(0.1, -0.1, 0.1, 0.3), spec) == 0.0);
  const double j = objective(tensor_from(0.12, -0.09, 0.12, 0.05), spec);
  CHECK(j == doctest::Approx(0.0019).epsilon(1e-12));
  CHECK(objective(tensor_from(0.12, -0.09, 0.12, 0.05), example1_objective(2.0)) == doctest::Approx(2 * j));
}

TEST_CASE("objective entry labels") {
  const ObjectiveEntry e = ObjectiveEntry::parse("1122", -0.1, 30);
  CHECK(e.i == 1);
  CHECK(e.k == 2);
  CHECK(e.label() == "1122");
  CHECK_THROWS_AS(ObjectiveEntry::parse("1132", 0, 1), ConfigError);
  CHECK_THROWS_AS(ObjectiveEntry::parse("11", 0, 1), ConfigError);
  ObjectiveSpec negative;
  negative.entries = {ObjectiveEntry::parse("1111", 0, -1)};
  CHECK_THROWS_AS(negative.validate(), ConfigError);
  ObjectiveSpec empty;
  CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_CASE("apparent Poisson ratio") {
  CHECK(apparent_poisson(isotropic_tensor(0.91, 0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(apparent_poisson(isotropic_tensor(5.0, -0.4)) == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(apparent_poisson(tensor_from(0.1, -0.0999, 0.1, 0.05)) < -0.99);
  CHECK(apparent_poisson(tensor_from(0.3, 0.0, 0.7, 0.1)) == 0.0);
  CHECK_THROWS_AS(apparent_poisson(tensor_from(0.1, -0.1, 0.1, 0.05)), DegenerateTensor);
}

TEST_CASE("energy and one-sided forms agree at the discrete solution") {
  const UnitCellMesh mesh = build_mesh(16);
  PhaseSet p;
  p.tensors = {isotropic_tensor(0.91, 0.3), isotropic_tensor(1e-4, 0.3), isotropic_tensor(1.82, 0.3),
               isotropic_tensor(1e-4, 0.3)};
  p.epsilon = 2 * mesh.dx();
  const TensorField field =
      material_field(mesh, testing::random_level_set(mesh, 1), testing::random_level_set(mesh, 2), p);
  const CellSolutions sol = solve_cell_problems(mesh, field, {1e-12, 0, 1});
  const Eigen::Matrix3d energy = homogenized_matrix(mesh, field, sol);
  const Eigen::Matrix3d one_sided = homogenized_tensor_unsymmetric(mesh, field, sol);
  CHECK((energy - one_sided).cwiseAbs().maxCoeff() < 1e-8 * energy.cwiseAbs().maxCoeff());
}

TEST_CASE("random states are symmetric, definite and within the Voigt and Reuss bounds") {
  const UnitCellMesh mesh = build_mesh(16);
  PhaseSet p;
  p.tensors = {isotropic_tensor(0.91, 0.3), isotropic_tensor(1e-4, 0.3), isotropic_tensor(1.82, 0.3),
               isotropic_tensor(1e-4, 0.3)};
  p.epsilon = 2 * mesh.dx();
  const CellSolver solver(mesh);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const TensorField field = material_field(mesh, testing::random_level_set(mesh, 100 + s),
                                             testing::random_level_set(mesh, 200 + s), p);
    const CellSolutions sol = solver.solve(field, {});
    const Eigen::Matrix3d raw = homogenized_matrix(mesh, field, sol);
    CHECK((raw - raw.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * raw.cwiseAbs().maxCoeff());
    const ElasticTensor4 ah(raw);
    CHECK(ah.is_positive_definite());
    const double scale = raw.norm();
    CHECK(ElasticTensor4(voigt_average(mesh, field).voigt() - raw).min_eigenvalue() >= -1e-9 * scale);
    CHECK(ElasticTensor4(raw - reuss_average(mesh, field).voigt()).min_eigenvalue() >= -1e-9 * scale);
  }
}

TEST_CASE("phase volumes sum to one") {
  const UnitCellMesh mesh = build_mesh(20);
  PhaseSet p;
  p.tensors = {isotropic_tensor(1, 0.3), isotropic_tensor(1, 0.3), isotropic_tensor(1, 0.3),
               isotropic_tensor(1, 0.3)};
  p.epsilon = 0.1;
  const auto v = phase_volumes(mesh, testing::random_level_set(mesh, 4), testing::random_level_set(mesh, 5), p);
  CHECK(std::abs(v[0] + v[1] + v[2] + v[3] - 1.0) < 1e-12);
  const auto full = phase_volumes(mesh, testing::constant_field(mesh, -1), testing::constant_field(mesh, -1), p);
  CHECK(full[0] == doctest::Approx(1.0));
}
