#include "auxcell/material.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "auxcell/error.hpp"

namespace auxcell {

ElasticTensor4::ElasticTensor4(const Eigen::Matrix3d& voigt)
    : voigt_(0.5 * (voigt + voigt.transpose())) {}

int voigt_index(int i, int j) {
  if (i < 1 || i > 2 || j < 1 || j > 2) {
    throw std::out_of_range("tensor indices must be 1 or 2");
  }
  return i == j ? i - 1 : 2;
}

double ElasticTensor4::at(int i, int j, int k, int l) const {
  return voigt_(voigt_index(i, j), voigt_index(k, l));
}

double ElasticTensor4::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(voigt_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[0];
}

bool ElasticTensor4::is_positive_definite() const { return min_eigenvalue() > 0.0; }

ElasticTensor4 isotropic_tensor(double young, double poisson, PlaneModel model) {
  if (!(young > 0.0) || !std::isfinite(young)) {
    throw ConfigError("Young modulus must be positive, got " + std::to_string(young));
  }
  const double upper = model == PlaneModel::Stress ? 1.0 : 0.5;
  if (!(poisson > -1.0 && poisson < 0.5) || (model == PlaneModel::Stress && poisson >= upper)) {
    throw ConfigError("Poisson ratio must lie in (-1, 0.5), got " + std::to_string(poisson));
  }
  const double mu = young / (2.0 * (1.0 + poisson));
  const double kappa = model == PlaneModel::Stress
                           ? young / (2.0 * (1.0 - poisson))
                           : young / (2.0 * (1.0 + poisson) * (1.0 - 2.0 * poisson));
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(0, 0) = c(1, 1) = kappa + mu;
  c(0, 1) = c(1, 0) = kappa - mu;
  c(2, 2) = mu;
  return ElasticTensor4(c);
}

void PhaseSet::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("interface half-width epsilon must be positive");
  for (int k = 0; k < 4; ++k) {
    if (volume_targets[k] < 0.0 || volume_targets[k] > 1.0) {
      throw ConfigError("volume target of phase " + std::to_string(k + 1) + " must lie in [0, 1]");
    }
    if (!tensors[k].is_positive_definite()) {
      throw ConfigError("phase " + std::to_string(k + 1) + " tensor is not positive definite");
    }
  }
}

double heaviside(double t, double eps) {
  // Closed ends: sin(pi) is not exactly zero in floating point.
  if (t <= -eps) return 0.0;
  if (t >= eps) return 1.0;
  const double s = t / eps;
  return 0.5 * (1.0 + s + std::sin(std::numbers::pi * s) / std::numbers::pi);
}

double heaviside_derivative(double t, double eps) {
  if (t <= -eps || t >= eps) return 0.0;
  return (1.0 + std::cos(std::numbers::pi * t / eps)) / (2.0 * eps);
}

std::array<double, 4> phase_densities(double d1, double d2, const PhaseSet& phases) {
  const double h1 = heaviside(d1, phases.epsilon);
  const double h2 = heaviside(d2, phases.epsilon);
  return {(1.0 - h1) * (1.0 - h2), h1 * (1.0 - h2), (1.0 - h1) * h2, h1 * h2};
}

ElasticTensor4 interpolate_tensor(double d1, double d2, const PhaseSet& phases) {
  const auto iota = phase_densities(d1, d2, phases);
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  for (int k = 0; k < 4; ++k) c += iota[k] * phases.tensors[k].voigt();
  return ElasticTensor4(c);
}

ElasticTensor4 a_star(double d_other, const PhaseSet& phases) {
  const auto& a = phases.tensors;
  const double h = heaviside(d_other, phases.epsilon);
  return (a[1] - a[0]) + h * (a[0] - a[1] - a[2] + a[3]);
}

double h_star(double d_other, const std::array<double, 4>& l, double eps) {
  const double h = heaviside(d_other, eps);
  return l[1] - l[0] + h * (l[0] - l[1] - l[2] + l[3]);
}

ElasticTensor4 a_star(int i, double d_other, const PhaseSet& phases) {
  if (i == 0) return a_star(d_other, phases);
  const auto& a = phases.tensors;
  const double h = heaviside(d_other, phases.epsilon);
  return (a[2] - a[0]) + h * (a[0] - a[1] - a[2] + a[3]);
}

double h_star(int i, double d_other, const std::array<double, 4>& l, double eps) {
  if (i == 0) return h_star(d_other, l, eps);
  const double h = heaviside(d_other, eps);
  return l[2] - l[0] + h * (l[0] - l[1] - l[2] + l[3]);
}

}  // namespace auxcell
