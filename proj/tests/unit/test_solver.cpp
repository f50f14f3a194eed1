#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "auxcell/cell_solver.hpp"
#include "auxcell/error.hpp"
#include "auxcell/homogenizer.hpp"
#include "auxcell/linear_solver.hpp"
#include "auxcell/validation.hpp"

using namespace auxcell;

namespace {

PhaseSet example_phases(double eps) {
  PhaseSet p;
  p.tensors = {isotropic_tensor(0.91, 0.3), isotropic_tensor(1e-4, 0.3), isotropic_tensor(1.82, 0.3),
               isotropic_tensor(1e-4, 0.3)};
  p.epsilon = eps;
  return p;
}

TensorField random_field(const UnitCellMesh& mesh, std::uint64_t seed) {
  const PhaseSet p = example_phases(2.0 * mesh.dx());
  return material_field(mesh, testing::random_level_set(mesh, seed), testing::random_level_set(mesh, seed + 7), p);
}

}  // namespace

TEST_CASE("stiffness is symmetric and annihilates translations") {
  const UnitCellMesh mesh = build_mesh(8);
  const SparseMatrix k = assemble_stiffness(mesh, random_field(mesh, 3));
  const Eigen::MatrixXd dense = Eigen::MatrixXd(k);
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(k.cols());
    for (int d = 0; d < mesh.periodic_node_count(); ++d) t[2 * d + c] = 1.0;
    CHECK((k * t).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("uniform strain energy of a single element") {
  // eps(u) for u = E^11 y restricted to one triangle, energy = A1111 * area.
  const UnitCellMesh mesh = build_mesh(4);
  const ElasticTensor4 a = isotropic_tensor(0.91, 0.3);
  for (int e : {0, 5, 17}) {
    const auto b = strain_displacement(mesh, e);
    Eigen::Matrix<double, 6, 1> u;
    for (int v = 0; v < 3; ++v) {
      const auto y = mesh.node(mesh.element(e).nodes[v]);
      u[2 * v] = y.x();
      u[2 * v + 1] = 0.0;
    }
    const Eigen::Vector3d strain = b * u;
    CHECK((strain - Eigen::Vector3d(1, 0, 0)).norm() < 1e-13);
    CHECK(0.5 * a.energy(strain) == doctest::Approx(0.5));
  }
}

TEST_CASE("uniform field gives zero loads and zero correctors") {
  const UnitCellMesh mesh = build_mesh(10);
  const TensorField field(mesh.element_count(), isotropic_tensor(0.91, 0.3));
  const CellSolver solver(mesh);
  for (const auto& f : solver.loads(field)) CHECK(f.cwiseAbs().maxCoeff() < 1e-14);
  const CellSolutions sol = solver.solve(field, {});
  for (const auto& chi : sol.chi) CHECK(chi.cwiseAbs().maxCoeff() <= 1e-12);
  const HomogenizedTensor ah = homogenized_tensor(mesh, field, sol);
  CHECK(ah.a1111() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ah.a1122() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ah.a1212() == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("correctors have zero mean and small residual") {
  const UnitCellMesh mesh = build_mesh(16);
  const TensorField field = random_field(mesh, 11);
  const CellSolutions sol = solve_cell_problems(mesh, field, {1e-10, 0, 1});
  for (int a = 0; a < 3; ++a) {
    for (int c = 0; c < 2; ++c) {
      // Lumped mass rows are the exact integrals of the P1 basis functions.
      double mean = 0.0;
      for (int d = 0; d < mesh.periodic_node_count(); ++d) mean += mesh.lumped_mass()[d] * sol.chi[a][2 * d + c];
      CHECK(std::abs(mean) < 1e-10);
    }
    CHECK(sol.residual[a] <= 1e-10);
  }
  CHECK(sol.material_fingerprint == fingerprint(field));
}

TEST_CASE("sharp laminate matches the frozen closed form") {
  // Values printed by tests/oracles/laminate_oracle.py.
  const double want1111 = 1.485, want1122 = 0.4, want2222 = 1.333333333333333, want1212 = 0.466666666666667;
  const UnitCellMesh mesh = build_mesh(100);
  const PhaseSet p = example_phases(0.02);
  const MultiLevelSet sets = laminate_level_sets(mesh);
  const TensorField field = material_field(mesh, sets.phi[0], sets.phi[1], p);
  const CellSolutions sol = solve_cell_problems(mesh, field, {});
  const HomogenizedTensor ah = homogenized_tensor(mesh, field, sol);
  CHECK(std::abs(ah.a1111() / want1111 - 1.0) <= 0.02);
  CHECK(std::abs(ah.a1122() / want1122 - 1.0) <= 0.02);
  CHECK(std::abs(ah.a2222() / want2222 - 1.0) <= 0.02);
  CHECK(std::abs(ah.a1212() / want1212 - 1.0) <= 0.02);
  // Harmonic and arithmetic means bracket the in-layer stiffness.
  CHECK(ah.a1111() < 1.5);
  CHECK(ah.a2222() > 1.0 / (0.5 / 1.0 + 0.5 / 2.0) - 1e-9);

  // The library's block formula reproduces the oracle numbers.
  const ElasticTensor4 closed = laminate_tensor(p.tensors[0], p.tensors[2], 0.5);
  CHECK(closed.at(1, 1, 1, 1) == doctest::Approx(want1111).epsilon(1e-12));
  CHECK(closed.at(1, 1, 2, 2) == doctest::Approx(want1122).epsilon(1e-12));
  CHECK(closed.at(2, 2, 2, 2) == doctest::Approx(want2222).epsilon(1e-12));
  CHECK(closed.at(1, 2, 1, 2) == doctest::Approx(want1212).epsilon(1e-12));
}

TEST_CASE("threaded solves are bit-identical to serial ones") {
  const UnitCellMesh mesh = build_mesh(16);
  const TensorField field = random_field(mesh, 5);
  const CellSolutions serial = solve_cell_problems(mesh, field, {1e-9, 0, 1});
  const CellSolutions threaded = solve_cell_problems(mesh, field, {1e-9, 0, 3});
  for (int a = 0; a < 3; ++a) {
    CHECK(serial.chi[a] == threaded.chi[a]);
    CHECK(serial.iterations[a] == threaded.iterations[a]);
  }
}

TEST_CASE("warm start from the converged solution needs almost no iterations") {
  const UnitCellMesh mesh = build_mesh(16);
  const TensorField field = random_field(mesh, 9);
  const CellSolver solver(mesh);
  const CellSolutions cold = solver.solve(field, {});
  const CellSolutions warm = solver.solve(field, {}, &cold);
  for (int a = 0; a < 3; ++a) {
    CHECK(warm.iterations[a] <= 2);
    CHECK((warm.chi[a] - cold.chi[a]).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("conjugate gradients on a small definite system") {
  SparseMatrix a(3, 3);
  a.insert(0, 0) = 4;
  a.insert(0, 1) = 1;
  a.insert(1, 0) = 1;
  a.insert(1, 1) = 3;
  a.insert(2, 2) = 2;
  const Eigen::Vector3d b(1, 2, 3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  const CgReport r = conjugate_gradient(a, b, x, {1e-14, 0});
  CHECK(r.converged);
  CHECK((Eigen::MatrixXd(a) * x - b).norm() < 1e-12);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(conjugate_gradient(a, b, y, {1e-14, 1}), SolverFailure);
}

TEST_CASE("projecting out constants") {
  Eigen::VectorXd v(6);
  v << 1, 10, 2, 20, 3, 30;
  project_out_constants(v, 2);
  CHECK(std::abs(v[0] + v[2] + v[4]) < 1e-14);
  CHECK(std::abs(v[1] + v[3] + v[5]) < 1e-14);
  CHECK(v[0] == doctest::Approx(-1.0));
}

TEST_CASE("a non-definite element tensor is rejected") {
  const UnitCellMesh mesh = build_mesh(4);
  TensorField field(mesh.element_count(), isotropic_tensor(1.0, 0.3));
  field[3] = ElasticTensor4::zero();
  CHECK_THROWS_AS(assemble_stiffness(mesh, field), IllPosedMaterial);
}
