#pragma once

#include <array>

#include <Eigen/Core>

namespace auxcell {

/// Fourth-order plane elasticity tensor with minor and major symmetries.
///
/// Stored as a symmetric 3x3 matrix in the ordered basis (11, 22, 12) acting
/// on engineering strain (eps11, eps22, 2 eps12), so that
/// A_ijkl = voigt(v(ij), v(kl)) and the energy density is e^T C e.
class ElasticTensor4 {
 public:
  ElasticTensor4() : voigt_(Eigen::Matrix3d::Zero()) {}
  /// The matrix is symmetrized; callers pass symmetric data.
  explicit ElasticTensor4(const Eigen::Matrix3d& voigt);

  static ElasticTensor4 zero() { return ElasticTensor4(); }

  /// Component A_ijkl, indices in {1, 2}.
  double at(int i, int j, int k, int l) const;
  const Eigen::Matrix3d& voigt() const { return voigt_; }

  /// e^T C e for an engineering-strain vector.
  double energy(const Eigen::Vector3d& strain) const { return strain.dot(voigt_ * strain); }
  double bilinear(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
    return a.dot(voigt_ * b);
  }
  bool is_positive_definite() const;
  double min_eigenvalue() const;

  ElasticTensor4& operator+=(const ElasticTensor4& other) {
    voigt_ += other.voigt_;
    return *this;
  }
  ElasticTensor4& operator-=(const ElasticTensor4& other) {
    voigt_ -= other.voigt_;
    return *this;
  }
  ElasticTensor4& operator*=(double s) {
    voigt_ *= s;
    return *this;
  }
  friend ElasticTensor4 operator+(ElasticTensor4 a, const ElasticTensor4& b) { return a += b; }
  friend ElasticTensor4 operator-(ElasticTensor4 a, const ElasticTensor4& b) { return a -= b; }
  friend ElasticTensor4 operator*(double s, ElasticTensor4 a) { return a *= s; }
  friend bool operator==(const ElasticTensor4& a, const ElasticTensor4& b) {
    return a.voigt_ == b.voigt_;
  }

 private:
  Eigen::Matrix3d voigt_;
};

/// Voigt slot of the symmetric index pair (i, j), indices in {1, 2}.
int voigt_index(int i, int j);

enum class PlaneModel { Stress, Strain };

/// Isotropic tensor 2 mu I4 + (kappa - mu) I2 (x) I2 from Young's modulus and
/// Poisson ratio. Plane stress uses kappa = E / (2 (1 - nu)); plane strain
/// uses the 3D bulk response kappa = E / (2 (1 + nu)(1 - 2 nu)).
ElasticTensor4 isotropic_tensor(double young, double poisson, PlaneModel model = PlaneModel::Stress);

/// The four phase tensors, their volume targets and the interface half-width.
///
/// Phase ordering follows the two level sets: F1 = S1 n S2, F2 = S1^c n S2,
/// F3 = S1 n S2^c, F4 = S1^c n S2^c.
struct PhaseSet {
  std::array<ElasticTensor4, 4> tensors;
  std::array<double, 4> volume_targets{};
  /// Unconstrained phases carry a fixed zero multiplier.
  std::array<bool, 4> constrained{};
  double epsilon = 0.02;

  void validate() const;
};

/// Smoothed Heaviside: 0 below -eps, 1 above eps, C^1 sine ramp in between.
double heaviside(double t, double eps);
/// d/dt of heaviside; integrates to one.
double heaviside_derivative(double t, double eps);

/// Four-phase interpolation of the phase tensors at distances (d1, d2).
ElasticTensor4 interpolate_tensor(double d1, double d2, const PhaseSet& phases);

/// Phase densities (iota_1 .. iota_4); they sum to one.
std::array<double, 4> phase_densities(double d1, double d2, const PhaseSet& phases);

/// Derivative of interpolate_tensor with respect to the Heaviside value of one
/// level set, given the distance of the *other* one.
ElasticTensor4 a_star(double d_other, const PhaseSet& phases);

/// Multiplier counterpart of a_star: l2 - l1 + h(d_other) (l1 - l2 - l3 + l4).
double h_star(double d_other, const std::array<double, 4>& multipliers, double eps);

/// Derivative of interpolate_tensor with respect to h(d_i), i in {0, 1}. For
/// i = 0 this is a_star above; for i = 1 phases 2 and 3 trade places:
/// A3 - A1 + h(d_1) (A1 - A2 - A3 + A4).
ElasticTensor4 a_star(int i, double d_other, const PhaseSet& phases);
/// Multiplier counterpart of a_star(i, ...).
double h_star(int i, double d_other, const std::array<double, 4>& multipliers, double eps);

}  // namespace auxcell
