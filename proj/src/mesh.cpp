#include "auxcell/mesh.hpp"

#include <string>

#include "auxcell/error.hpp"

namespace auxcell {

UnitCellMesh build_mesh(int n) {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("mesh.n must be an even integer >= 2, got " + std::to_string(n));
  }
  UnitCellMesh mesh;
  mesh.n_ = n;
  mesh.dx_ = 1.0 / n;
  const int side = n + 1;
  const auto node_index = [side](int i, int j) { return j * side + i; };

  mesh.nodes_.reserve(side * side);
  mesh.periodic_map_.reserve(side * side);
  mesh.node_dof_.reserve(side * side);
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      mesh.nodes_.emplace_back(-0.5 + i * mesh.dx_, -0.5 + j * mesh.dx_);
      mesh.periodic_map_.push_back(node_index(i % n, j % n));
      mesh.node_dof_.push_back((j % n) * n + (i % n));
    }
  }

  mesh.elements_.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = node_index(i, j);
      const int b = node_index(i + 1, j);
      const int c = node_index(i + 1, j + 1);
      const int d = node_index(i, j + 1);
      std::array<std::array<int, 3>, 2> tris;
      if ((i + j) % 2 == 0) {
        tris = {{{a, b, c}, {a, c, d}}};
      } else {
        tris = {{{a, b, d}, {b, c, d}}};
      }
      for (const auto& t : tris) {
        Triangle tri;
        tri.nodes = t;
        for (int k = 0; k < 3; ++k) tri.dofs[k] = mesh.node_dof_[t[k]];
        mesh.elements_.push_back(tri);
      }
    }
  }

  mesh.areas_.reserve(mesh.elements_.size());
  mesh.gradients_.reserve(mesh.elements_.size());
  mesh.lumped_mass_ = NodalField::Zero(n * n);
  for (const auto& tri : mesh.elements_) {
    const Eigen::Vector2d& p0 = mesh.nodes_[tri.nodes[0]];
    const Eigen::Vector2d& p1 = mesh.nodes_[tri.nodes[1]];
    const Eigen::Vector2d& p2 = mesh.nodes_[tri.nodes[2]];
    const Eigen::Vector2d e1 = p1 - p0;
    const Eigen::Vector2d e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    const double area = 0.5 * det;
    // grad(lambda_k) = rot90(opposite edge) / (2 area)
    Eigen::Matrix<double, 2, 3> grad;
    grad.col(0) << (p1.y() - p2.y()), (p2.x() - p1.x());
    grad.col(1) << (p2.y() - p0.y()), (p0.x() - p2.x());
    grad.col(2) << (p0.y() - p1.y()), (p1.x() - p0.x());
    grad /= det;
    mesh.areas_.push_back(area);
    mesh.gradients_.push_back(grad);
    for (int k = 0; k < 3; ++k) mesh.lumped_mass_[tri.dofs[k]] += area / 3.0;
  }
  return mesh;
}

int periodic_dof_count(const UnitCellMesh& mesh) { return mesh.periodic_node_count(); }

Eigen::Vector2d UnitCellMesh::dof_position(int dof) const {
  const int i = dof % n_;
  const int j = dof / n_;
  return {-0.5 + i * dx_, -0.5 + j * dx_};
}

Eigen::Vector2d UnitCellMesh::barycenter(int e) const {
  const auto& t = elements_[e].nodes;
  return (nodes_[t[0]] + nodes_[t[1]] + nodes_[t[2]]) / 3.0;
}

ElementField UnitCellMesh::element_average(const NodalField& field) const {
  ElementField out(element_count());
  for (int e = 0; e < element_count(); ++e) {
    const auto& d = elements_[e].dofs;
    out[e] = (field[d[0]] + field[d[1]] + field[d[2]]) / 3.0;
  }
  return out;
}

NodalField UnitCellMesh::nodal_average(const ElementField& field) const {
  NodalField sum = NodalField::Zero(periodic_node_count());
  NodalField weight = NodalField::Zero(periodic_node_count());
  for (int e = 0; e < element_count(); ++e) {
    for (int dof : elements_[e].dofs) {
      sum[dof] += areas_[e] * field[e];
      weight[dof] += areas_[e];
    }
  }
  return sum.cwiseQuotient(weight);
}

double UnitCellMesh::integrate(const ElementField& field) const {
  double total = 0.0;
  for (int e = 0; e < element_count(); ++e) total += areas_[e] * field[e];
  return total;
}

}  // namespace auxcell
