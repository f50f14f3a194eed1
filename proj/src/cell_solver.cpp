#include "auxcell/cell_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <thread>

#include "auxcell/error.hpp"

namespace auxcell {

TensorField material_field(const UnitCellMesh& mesh, const NodalField& d1, const NodalField& d2,
                           const PhaseSet& phases) {
  const ElementField e1 = mesh.element_average(d1);
  const ElementField e2 = mesh.element_average(d2);
  TensorField field;
  field.reserve(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    field.push_back(interpolate_tensor(e1[e], e2[e], phases));
  }
  return field;
}

std::uint64_t fingerprint(const TensorField& field) {
  // FNV-1a over the raw bytes.
  std::uint64_t hash = 1469598103934665603ULL;
  for (const auto& tensor : field) {
    const double* data = tensor.voigt().data();
    for (int k = 0; k < 9; ++k) {
      std::uint64_t bits;
      std::memcpy(&bits, data + k, sizeof bits);
      for (int byte = 0; byte < 8; ++byte) {
        hash ^= (bits >> (8 * byte)) & 0xffU;
        hash *= 1099511628211ULL;
      }
    }
  }
  return hash;
}

Eigen::Matrix<double, 3, 6> strain_displacement(const UnitCellMesh& mesh, int e) {
  const auto& g = mesh.shape_gradients(e);
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  for (int k = 0; k < 3; ++k) {
    b(0, 2 * k) = g(0, k);
    b(1, 2 * k + 1) = g(1, k);
    b(2, 2 * k) = g(1, k);
    b(2, 2 * k + 1) = g(0, k);
  }
  return b;
}

Eigen::Matrix3d element_strains(const UnitCellMesh& mesh, const CellSolutions& solutions, int e) {
  const auto b = strain_displacement(mesh, e);
  const auto& dofs = mesh.element(e).dofs;
  Eigen::Matrix3d strains;
  for (int a = 0; a < 3; ++a) {
    Eigen::Matrix<double, 6, 1> local;
    for (int k = 0; k < 3; ++k) {
      local[2 * k] = solutions.chi[a][2 * dofs[k]];
      local[2 * k + 1] = solutions.chi[a][2 * dofs[k] + 1];
    }
    strains.col(a) = unit_strain(a) + b * local;
  }
  return strains;
}

CellSolver::CellSolver(const UnitCellMesh& mesh) : mesh_(&mesh) {
  const int ndof = 2 * mesh.periodic_node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(36 * mesh.element_count());
  for (const auto& tri : mesh.elements()) {
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        triplets.emplace_back(2 * tri.dofs[i / 2] + i % 2, 2 * tri.dofs[j / 2] + j % 2, 1.0);
      }
    }
  }
  pattern_.resize(ndof, ndof);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  scatter_.resize(mesh.element_count());
  b_matrices_.reserve(mesh.element_count());
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& tri = mesh.element(e);
    for (int i = 0; i < 6; ++i) {
      const int row = 2 * tri.dofs[i / 2] + i % 2;
      for (int j = 0; j < 6; ++j) {
        const int col = 2 * tri.dofs[j / 2] + j % 2;
        const int* pos = std::lower_bound(inner + outer[row], inner + outer[row + 1], col);
        scatter_[e][6 * i + j] = static_cast<int>(pos - inner);
      }
    }
    b_matrices_.push_back(strain_displacement(mesh, e));
  }
}

SparseMatrix CellSolver::assemble(const TensorField& field) const {
  const auto& mesh = *mesh_;
  if (static_cast<int>(field.size()) != mesh.element_count()) {
    throw ConfigError("tensor field size does not match the mesh element count");
  }
  SparseMatrix k = pattern_;
  std::fill(k.valuePtr(), k.valuePtr() + k.nonZeros(), 0.0);
  double* values = k.valuePtr();
  // Elements are scattered in index order, so the sums are reproducible.
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& c = field[e];
    if (!(c.min_eigenvalue() > 0.0)) {
      throw IllPosedMaterial("element " + std::to_string(e) +
                             " has a non positive definite tensor; the cell operator would be "
                             "singular beyond translations");
    }
    const auto& b = b_matrices_[e];
    const Eigen::Matrix<double, 6, 6> ke = mesh.area(e) * (b.transpose() * c.voigt() * b);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) values[scatter_[e][6 * i + j]] += ke(i, j);
    }
  }
  return k;
}

std::array<Eigen::VectorXd, 3> CellSolver::loads(const TensorField& field) const {
  const auto& mesh = *mesh_;
  const int ndof = 2 * mesh.periodic_node_count();
  std::array<Eigen::VectorXd, 3> f;
  for (auto& v : f) v = Eigen::VectorXd::Zero(ndof);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& tri = mesh.element(e);
    const Eigen::Matrix<double, 6, 3> fe =
        -mesh.area(e) * (b_matrices_[e].transpose() * field[e].voigt());
    for (int a = 0; a < 3; ++a) {
      for (int i = 0; i < 6; ++i) f[a][2 * tri.dofs[i / 2] + i % 2] += fe(i, a);
    }
  }
  return f;
}

namespace {

// Scale of the unassembled load; a right-hand side that cancels to round-off
// relative to it means a homogeneous medium with zero correctors.
double unassembled_load_norm(const UnitCellMesh& mesh, const TensorField& field, int load_case,
                             const std::vector<Eigen::Matrix<double, 3, 6>>& b_matrices) {
  double sum = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Eigen::Matrix<double, 6, 1> fe =
        mesh.area(e) * (b_matrices[e].transpose() * (field[e].voigt() * unit_strain(load_case)));
    sum += fe.squaredNorm();
  }
  return std::sqrt(sum);
}

void remove_mean(const UnitCellMesh& mesh, Eigen::VectorXd& chi) {
  const auto& mass = mesh.lumped_mass();
  auto view = Eigen::Map<Eigen::MatrixXd>(chi.data(), 2, mass.size());
  const Eigen::Vector2d mean = view * mass;  // sum of mass is |Y| = 1
  view.colwise() -= mean;
}

}  // namespace

CellSolutions CellSolver::solve(const TensorField& field, const CellSolverOptions& options,
                                const CellSolutions* warm_start) const {
  const auto& mesh = *mesh_;
  const SparseMatrix k = assemble(field);
  const auto f = loads(field);
  const int ndof = 2 * mesh.periodic_node_count();

  CellSolutions out;
  out.material_fingerprint = fingerprint(field);
  CgOptions cg;
  cg.tolerance = options.tolerance;
  cg.max_iterations = options.max_iterations;

  auto run_case = [&](int a) {
    const double scale = unassembled_load_norm(mesh, field, a, b_matrices_);
    Eigen::VectorXd rhs = f[a];
    project_out_constants(rhs, 2);
    if (rhs.norm() <= 1e-13 * scale) {
      out.chi[a] = Eigen::VectorXd::Zero(ndof);
      out.residual[a] = 0.0;
      out.iterations[a] = 0;
      return;
    }
    Eigen::VectorXd x = warm_start != nullptr && warm_start->chi[a].size() == ndof
                            ? warm_start->chi[a]
                            : Eigen::VectorXd::Zero(ndof);
    const CgReport report = conjugate_gradient(k, rhs, x, cg, 2);
    remove_mean(mesh, x);
    out.chi[a] = std::move(x);
    out.residual[a] = report.relative_residual;
    out.iterations[a] = report.iterations;
  };

  if (options.threads > 1) {
    std::array<std::exception_ptr, 3> errors;
    std::vector<std::thread> workers;
    for (int a = 0; a < 3; ++a) {
      workers.emplace_back([&, a] {
        try {
          run_case(a);
        } catch (...) {
          errors[a] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  } else {
    for (int a = 0; a < 3; ++a) run_case(a);
  }
  return out;
}

SparseMatrix assemble_stiffness(const UnitCellMesh& mesh, const TensorField& field) {
  return CellSolver(mesh).assemble(field);
}

CellSolutions solve_cell_problems(const UnitCellMesh& mesh, const TensorField& field,
                                  const CellSolverOptions& options) {
  return CellSolver(mesh).solve(field, options);
}

}  // namespace auxcell
