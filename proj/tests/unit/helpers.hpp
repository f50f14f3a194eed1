#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "auxcell/config.hpp"
#include "auxcell/level_set.hpp"
#include "auxcell/mesh.hpp"

namespace testing {

inline auxcell::NodalField constant_field(const auxcell::UnitCellMesh& mesh, double value) {
  return auxcell::NodalField::Constant(mesh.periodic_node_count(), value);
}

/// Signed distance to a circle of radius r centred at c (no wrapping).
inline auxcell::NodalField circle_sdf(const auxcell::UnitCellMesh& mesh, double r,
                                      Eigen::Vector2d c = Eigen::Vector2d::Zero()) {
  auxcell::NodalField phi(mesh.periodic_node_count());
  for (int d = 0; d < phi.size(); ++d) phi[d] = (mesh.dof_position(d) - c).norm() - r;
  return phi;
}

/// Smooth random level set with interfaces: a few periodic modes plus an offset.
inline auxcell::NodalField random_level_set(const auxcell::UnitCellMesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auxcell::NodalField phi(mesh.periodic_node_count());
  double a[4], p[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = 0.5 + u(rng);
    p[k] = 2.0 * M_PI * u(rng);
  }
  const double shift = 0.6 * (u(rng) - 0.5);
  for (int d = 0; d < phi.size(); ++d) {
    const auto y = mesh.dof_position(d);
    const double t = 2.0 * M_PI;
    phi[d] = 0.1 * (a[0] * std::cos(t * y.x() + p[0]) + a[1] * std::cos(t * y.y() + p[1]) +
                    a[2] * std::cos(t * (y.x() + y.y()) + p[2]) + a[3] * std::cos(t * (y.x() - y.y()) + p[3])) +
             0.1 * shift;
  }
  return phi;
}

/// Example-1 preset on a small mesh with a short run.
inline auxcell::Config small_config(int n, int iterations) {
  auxcell::Config c = auxcell::preset("example1");
  c.mesh_n = n;
  c.iterations = iterations;
  return c;
}

}  // namespace testing
