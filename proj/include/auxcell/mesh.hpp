#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace auxcell {

/// Scalar field with one value per periodic node (n*n entries).
using NodalField = Eigen::VectorXd;
/// Scalar field with one value per triangle (2*n*n entries).
using ElementField = Eigen::VectorXd;

struct Triangle {
  std::array<int, 3> nodes;  ///< indices into the (n+1)^2 node array, counter-clockwise
  std::array<int, 3> dofs;   ///< periodic node indices (n^2 numbering)
};

/// Structured periodic P1 triangulation of the unit cell Y = (-1/2, 1/2)^2.
///
/// Every grid square is split along one diagonal; the diagonal direction
/// alternates in a checkerboard so the mesh is invariant under x -> -x and
/// y -> -y. Node (i, j) sits at (-1/2 + i dx, -1/2 + j dx) for
/// 0 <= i, j <= n; nodes on the right and top edges are identified with
/// their masters on the left and bottom edges, giving n^2 periodic nodes.
class UnitCellMesh {
 public:
  int n() const { return n_; }
  double dx() const { return dx_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int element_count() const { return static_cast<int>(elements_.size()); }
  int periodic_node_count() const { return n_ * n_; }

  const Eigen::Vector2d& node(int index) const { return nodes_[index]; }
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }
  const std::vector<Triangle>& elements() const { return elements_; }
  const Triangle& element(int e) const { return elements_[e]; }

  /// Master node of `index`: itself for interior/left/bottom nodes.
  int periodic_master(int index) const { return periodic_map_[index]; }
  const std::vector<int>& periodic_map() const { return periodic_map_; }
  /// Periodic node index (0 .. n^2-1) of a node.
  int periodic_dof(int index) const { return node_dof_[index]; }

  /// Periodic node index of grid point (i, j); both wrap modulo n.
  int grid_dof(int i, int j) const {
    i %= n_;
    j %= n_;
    if (i < 0) i += n_;
    if (j < 0) j += n_;
    return j * n_ + i;
  }
  /// Position of a periodic node (its master copy).
  Eigen::Vector2d dof_position(int dof) const;

  double area(int e) const { return areas_[e]; }
  /// Columns are the (constant) gradients of the three barycentric basis functions.
  const Eigen::Matrix<double, 2, 3>& shape_gradients(int e) const { return gradients_[e]; }
  Eigen::Vector2d barycenter(int e) const;

  /// Row-sum lumped mass of the P1 basis per periodic node; sums to |Y| = 1.
  const NodalField& lumped_mass() const { return lumped_mass_; }

  /// Barycentric (one-point) average of a nodal field on every element.
  ElementField element_average(const NodalField& field) const;
  /// Area-weighted average of an element field onto periodic nodes.
  NodalField nodal_average(const ElementField& field) const;
  /// One-point quadrature of an element field over Y.
  double integrate(const ElementField& field) const;

 private:
  friend UnitCellMesh build_mesh(int n);

  int n_ = 0;
  double dx_ = 0.0;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<Triangle> elements_;
  std::vector<int> periodic_map_;
  std::vector<int> node_dof_;
  std::vector<double> areas_;
  std::vector<Eigen::Matrix<double, 2, 3>> gradients_;
  NodalField lumped_mass_;
};

/// Builds the periodic mesh with n cells per side; n must be even and >= 2.
UnitCellMesh build_mesh(int n);

/// Number of distinct periodic scalar DOFs per displacement component (n^2).
int periodic_dof_count(const UnitCellMesh& mesh);

}  // namespace auxcell
