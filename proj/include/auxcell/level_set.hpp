#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "auxcell/mesh.hpp"

namespace auxcell {

/// The two level sets phi_1, phi_2 on periodic nodes.
///
/// phi_i < 0 inside S_i, > 0 outside, = 0 on its boundary. Phase 1 is
/// S1 n S2, phase 2 is S1^c n S2, phase 3 is S1 n S2^c, phase 4 the rest.
struct MultiLevelSet {
  std::array<NodalField, 2> phi;
  /// Optimization iterations since the last reinitialization of each field.
  std::array<int, 2> since_reinit{0, 0};
};

/// Initial shape of one level set.
struct PatternSpec {
  enum class Kind { Circles, Concentric, Uniform, FromFile, Struts };
  Kind kind = Kind::Circles;

  // Circles: rows x cols array of equal circles centred in the cells of a
  // regular grid, shifted by `offset`. Odd rows can be staggered by half a
  // column for hexagonal arrangements.
  int rows = 1;
  int cols = 1;
  double radius = 0.25;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  bool stagger = false;

  // Concentric: annulus inner_radius < |y| < outer_radius about the centre.
  double inner_radius = 0.1;
  double outer_radius = 0.3;

  // Uniform: constant value everywhere (no interface).
  double value = -1.0;

  // FromFile: path of a level-set file written by write_level_set.
  std::string path;

  // Struts: union of segments {x0, y0, x1, y1} thickened by `radius`,
  // periodically wrapped and shifted by `offset`.
  std::vector<std::array<double, 4>> segments;

  /// When set, the pattern describes the complement: circles become holes.
  bool holes = false;
  /// Amplitude of seeded uniform noise added to the nodal values.
  double noise = 0.0;

  static Kind parse_kind(const std::string& name);
  static std::string kind_name(Kind kind);
};

/// Signed distance to the pattern, periodically wrapped, plus optional noise.
NodalField init_pattern(const PatternSpec& spec, const UnitCellMesh& mesh, std::uint64_t seed = 0);

/// Text serialization of one nodal field; values round-trip bit-exactly.
void write_level_set(const std::string& path, const NodalField& phi, int n);
NodalField read_level_set(const std::string& path, int expected_n);

/// True when the field has nodes of both signs.
bool has_interface(const NodalField& phi);

/// Largest stable pseudo-time step 0.5 dx / max|v| (max|v| floored at 1e-12).
double cfl_timestep(const NodalField& v, double dx);

/// Upwind (Godunov) |grad phi| at every node for motion with speed sign `speed`.
NodalField godunov_gradient_norm(const UnitCellMesh& mesh, const NodalField& phi,
                                 const NodalField& speed);

/// Central-difference |grad phi| at every node (periodic stencil).
NodalField central_gradient_norm(const UnitCellMesh& mesh, const NodalField& phi);

/// One explicit Godunov step of d phi/dt + v |grad phi| = 0 on the periodic
/// grid. Positive v moves the boundary outward (S grows). Throws CflViolation
/// when dt max|v| exceeds 0.5 dx.
NodalField transport(const UnitCellMesh& mesh, const NodalField& phi, const NodalField& v, double dt);

/// Redistancing by `sub_iterations` explicit steps of
/// d d/dt + S(phi)(|grad d| - 1) = 0 with S(phi) = phi / sqrt(phi^2 + dx^2)
/// and pseudo-time step 0.5 dx. Throws DegenerateLevelSet for one-signed input.
NodalField reinitialize(const UnitCellMesh& mesh, const NodalField& phi, int sub_iterations = 50);

}  // namespace auxcell
