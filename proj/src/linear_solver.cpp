#include "auxcell/linear_solver.hpp"

#include <cmath>
#include <string>

#include "auxcell/error.hpp"

namespace auxcell {

void project_out_constants(Eigen::VectorXd& v, int blocks) {
  if (blocks <= 0) return;
  const Eigen::Index nodes = v.size() / blocks;
  auto view = Eigen::Map<Eigen::MatrixXd>(v.data(), blocks, nodes);
  const Eigen::VectorXd mean = view.rowwise().mean();
  view.colwise() -= mean;
}

CgReport conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            const CgOptions& options, int kernel_blocks) {
  const Eigen::Index size = b.size();
  const int cap = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * size);
  if (x.size() != size) x = Eigen::VectorXd::Zero(size);

  Eigen::VectorXd rhs = b;
  project_out_constants(rhs, kernel_blocks);
  project_out_constants(x, kernel_blocks);

  CgReport report;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    x.setZero();
    report.converged = true;
    return report;
  }

  const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
  Eigen::VectorXd r = rhs - a * x;
  project_out_constants(r, kernel_blocks);
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  project_out_constants(z, kernel_blocks);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(size);
  double rz = r.dot(z);
  const double target = options.tolerance * rhs_norm;

  double r_norm = r.norm();
  int it = 0;
  while (r_norm > target && it < cap) {
    ap.noalias() = a * p;
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    project_out_constants(x, kernel_blocks);
    project_out_constants(r, kernel_blocks);
    z = inv_diag.cwiseProduct(r);
    project_out_constants(z, kernel_blocks);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    r_norm = r.norm();
    ++it;
  }

  // Report the true residual rather than the recurrence.
  Eigen::VectorXd true_r = rhs - a * x;
  project_out_constants(true_r, kernel_blocks);
  report.iterations = it;
  report.relative_residual = true_r.norm() / rhs_norm;
  report.converged = r_norm <= target;
  if (!report.converged) {
    throw SolverFailure("conjugate gradient did not converge in " + std::to_string(cap) +
                            " iterations (relative residual " +
                            std::to_string(report.relative_residual) + ")",
                        report.relative_residual);
  }
  return report;
}

}  // namespace auxcell
