#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace auxcell {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct CgOptions {
  /// Target for ||b - A x|| / ||b||.
  double tolerance = 1e-9;
  /// Iteration cap; <= 0 means 10 * size.
  int max_iterations = 0;
};

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// (semi-)definite matrix.
///
/// With `kernel_blocks` = b > 0 the matrix is assumed to annihilate the b
/// interleaved constant vectors (dof = b * node + component). The
/// right-hand side, preconditioned residuals and iterates are projected onto
/// their Euclidean complement after every step, so the iteration runs on the
/// quotient space where the matrix is definite.
///
/// `x` carries the initial guess in and the solution out. Throws
/// SolverFailure when the cap is reached.
CgReport conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            const CgOptions& options, int kernel_blocks = 0);

/// Removes the mean of each interleaved component in place.
void project_out_constants(Eigen::VectorXd& v, int blocks);

}  // namespace auxcell
