#include "auxcell/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "auxcell/error.hpp"

namespace auxcell {

PatternSpec::Kind PatternSpec::parse_kind(const std::string& name) {
  if (name == "circles") return Kind::Circles;
  if (name == "concentric") return Kind::Concentric;
  if (name == "uniform") return Kind::Uniform;
  if (name == "from-file") return Kind::FromFile;
  if (name == "struts") return Kind::Struts;
  throw ConfigError("unknown init pattern kind '" + name +
                    "' (expected circles, concentric, uniform, from-file or struts)");
}

std::string PatternSpec::kind_name(Kind kind) {
  switch (kind) {
    case Kind::Circles: return "circles";
    case Kind::Concentric: return "concentric";
    case Kind::Uniform: return "uniform";
    case Kind::FromFile: return "from-file";
    case Kind::Struts: return "struts";
  }
  return "circles";
}

namespace {

double min_image_distance(const Eigen::Vector2d& y, const Eigen::Vector2d& c) {
  double best = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx) {
    for (int sy = -1; sy <= 1; ++sy) {
      best = std::min(best, (y - c - Eigen::Vector2d(sx, sy)).norm());
    }
  }
  return best;
}

double segment_distance(const Eigen::Vector2d& y, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((y - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (y - a - t * ab).norm();
}

double min_image_segment_distance(const Eigen::Vector2d& y, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx) {
    for (int sy = -1; sy <= 1; ++sy) {
      const Eigen::Vector2d shift(sx, sy);
      best = std::min(best, segment_distance(y, a + shift, b + shift));
    }
  }
  return best;
}

}  // namespace

NodalField init_pattern(const PatternSpec& spec, const UnitCellMesh& mesh, std::uint64_t seed) {
  const int count = mesh.periodic_node_count();
  NodalField phi(count);
  switch (spec.kind) {
    case PatternSpec::Kind::Circles: {
      if (spec.rows < 1 || spec.cols < 1 || !(spec.radius > 0.0)) {
        throw ConfigError("circle pattern needs rows, cols >= 1 and a positive radius");
      }
      std::vector<Eigen::Vector2d> centers;
      for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
          const double shift = spec.stagger && r % 2 == 1 ? 0.5 : 0.0;
          centers.emplace_back(-0.5 + (c + 0.5 + shift) / spec.cols + spec.offset.x(),
                               -0.5 + (r + 0.5) / spec.rows + spec.offset.y());
        }
      }
      for (int dof = 0; dof < count; ++dof) {
        const Eigen::Vector2d y = mesh.dof_position(dof);
        double d = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) d = std::min(d, min_image_distance(y, c) - spec.radius);
        phi[dof] = d;
      }
      break;
    }
    case PatternSpec::Kind::Concentric: {
      if (!(spec.inner_radius >= 0.0 && spec.outer_radius > spec.inner_radius)) {
        throw ConfigError("concentric pattern needs 0 <= inner_radius < outer_radius");
      }
      for (int dof = 0; dof < count; ++dof) {
        const double r = min_image_distance(mesh.dof_position(dof), spec.offset);
        phi[dof] = std::max(spec.inner_radius - r, r - spec.outer_radius);
      }
      break;
    }
    case PatternSpec::Kind::Uniform:
      phi.setConstant(spec.value);
      break;
    case PatternSpec::Kind::FromFile:
      phi = read_level_set(spec.path, mesh.n());
      break;
    case PatternSpec::Kind::Struts: {
      if (spec.segments.empty() || !(spec.radius > 0.0)) {
        throw ConfigError("struts pattern needs at least one segment and a positive radius");
      }
      for (int dof = 0; dof < count; ++dof) {
        const Eigen::Vector2d y = mesh.dof_position(dof) - spec.offset;
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : spec.segments) {
          d = std::min(d, min_image_segment_distance(y, Eigen::Vector2d(s[0], s[1]), Eigen::Vector2d(s[2], s[3])));
        }
        phi[dof] = d - spec.radius;
      }
      break;
    }
  }
  if (spec.holes) phi = -phi;
  if (spec.noise > 0.0) {
    std::mt19937_64 rng(seed);
    for (int dof = 0; dof < count; ++dof) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      phi[dof] += spec.noise * (2.0 * u - 1.0);
    }
  }
  return phi;
}

void write_level_set(const std::string& path, const NodalField& phi, int n) {
  if (phi.size() != static_cast<Eigen::Index>(n) * n) {
    throw IoError("level set size does not match n = " + std::to_string(n));
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << "# auxcell level set\n" << "n " << n << "\n";
    char buf[40];
    for (Eigen::Index k = 0; k < phi.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g\n", phi[k]);
      out << buf;
    }
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw IoError("cannot move '" + tmp + "' to '" + path + "'");
  }
}

NodalField read_level_set(const std::string& path, int expected_n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open level-set file '" + path + "'");
  std::string line;
  int n = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream head(line);
    std::string key;
    head >> key >> n;
    if (key != "n" || !head) throw IoError("level-set file '" + path + "' lacks an 'n <cells>' header");
    break;
  }
  if (n != expected_n) {
    throw IoError("level-set file '" + path + "' has n = " + std::to_string(n) + ", mesh has " +
                  std::to_string(expected_n));
  }
  NodalField phi(static_cast<Eigen::Index>(n) * n);
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    if (!(in >> line)) throw IoError("level-set file '" + path + "' is truncated");
    phi[k] = std::strtod(line.c_str(), nullptr);
  }
  return phi;
}

bool has_interface(const NodalField& phi) {
  return phi.size() > 0 && phi.minCoeff() < 0.0 && phi.maxCoeff() > 0.0;
}

double cfl_timestep(const NodalField& v, double dx) {
  const double vmax = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
  return 0.5 * dx / std::max(vmax, 1e-12);
}

namespace {

// Godunov |grad phi| at node (i, j) for outward (speed > 0) or inward motion.
inline double godunov_norm(const double* phi, int n, int i, int j, double inv_dx, bool outward) {
  const int ip = i + 1 == n ? 0 : i + 1;
  const int im = i == 0 ? n - 1 : i - 1;
  const int jp = j + 1 == n ? 0 : j + 1;
  const int jm = j == 0 ? n - 1 : j - 1;
  const double c = phi[j * n + i];
  const double dxm = (c - phi[j * n + im]) * inv_dx;
  const double dxp = (phi[j * n + ip] - c) * inv_dx;
  const double dym = (c - phi[jm * n + i]) * inv_dx;
  const double dyp = (phi[jp * n + i] - c) * inv_dx;
  double gx, gy;
  if (outward) {
    gx = std::max(std::max(dxm, 0.0), -std::min(dxp, 0.0));
    gy = std::max(std::max(dym, 0.0), -std::min(dyp, 0.0));
  } else {
    gx = std::max(-std::min(dxm, 0.0), std::max(dxp, 0.0));
    gy = std::max(-std::min(dym, 0.0), std::max(dyp, 0.0));
  }
  return std::sqrt(gx * gx + gy * gy);
}

}  // namespace

NodalField godunov_gradient_norm(const UnitCellMesh& mesh, const NodalField& phi,
                                 const NodalField& speed) {
  const int n = mesh.n();
  const double inv_dx = 1.0 / mesh.dx();
  NodalField out(phi.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int k = j * n + i;
      out[k] = godunov_norm(phi.data(), n, i, j, inv_dx, speed[k] >= 0.0);
    }
  }
  return out;
}

NodalField central_gradient_norm(const UnitCellMesh& mesh, const NodalField& phi) {
  const int n = mesh.n();
  const double inv = 1.0 / (2.0 * mesh.dx());
  NodalField out(phi.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double gx = (phi[mesh.grid_dof(i + 1, j)] - phi[mesh.grid_dof(i - 1, j)]) * inv;
      const double gy = (phi[mesh.grid_dof(i, j + 1)] - phi[mesh.grid_dof(i, j - 1)]) * inv;
      out[mesh.grid_dof(i, j)] = std::hypot(gx, gy);
    }
  }
  return out;
}

NodalField transport(const UnitCellMesh& mesh, const NodalField& phi, const NodalField& v, double dt) {
  if (v.size() != phi.size()) throw ConfigError("velocity and level set sizes differ");
  const double vmax = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
  if (!(dt >= 0.0) || dt * vmax > 0.5 * mesh.dx() * (1.0 + 1e-12)) {
    throw CflViolation("time step " + std::to_string(dt) + " exceeds the CFL bound 0.5 dx / max|v|");
  }
  const int n = mesh.n();
  const double inv_dx = 1.0 / mesh.dx();
  NodalField out(phi.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int k = j * n + i;
      const double speed = v[k];
      out[k] = speed == 0.0 ? phi[k]
                            : phi[k] - dt * speed * godunov_norm(phi.data(), n, i, j, inv_dx, speed > 0.0);
    }
  }
  return out;
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Distance from a node to the zero of phi0 between it and a neighbour of
// opposite sign, from the quadratic through the node and that neighbour with
// a limited second difference. `c`, `nb` are the two values, `d2` the limited
// second difference (per dx^2 units already multiplied out).
double root_distance(double c, double nb, double d2, double dx) {
  const double linear = dx * c / (c - nb);
  if (std::abs(d2) < 1e-12) return linear;
  // p(s) = c + b s + a s^2 with p(dx) = nb and p'' = d2.
  const double a = 0.5 * d2;
  const double b = (nb - c) / dx - a * dx;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return linear;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  const double r1 = q / a;
  const double r2 = q != 0.0 ? c / q : linear;
  for (double r : {r1, r2}) {
    if (r >= 0.0 && r <= dx) return r;
  }
  return linear;
}

// Fifth-order WENO one-sided derivative from the five divided differences
// v1..v5 ordered along the upwind direction.
double weno5(double v1, double v2, double v3, double v4, double v5) {
  const double p1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0;
  const double p2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0;
  const double p3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0;
  const auto sq = [](double x) { return x * x; };
  const double s1 = 13.0 / 12.0 * sq(v1 - 2.0 * v2 + v3) + 0.25 * sq(v1 - 4.0 * v2 + 3.0 * v3);
  const double s2 = 13.0 / 12.0 * sq(v2 - 2.0 * v3 + v4) + 0.25 * sq(v2 - v4);
  const double s3 = 13.0 / 12.0 * sq(v3 - 2.0 * v4 + v5) + 0.25 * sq(3.0 * v3 - 4.0 * v4 + v5);
  const double eps = 1e-6 * std::max({sq(v1), sq(v2), sq(v3), sq(v4), sq(v5)}) + 1e-99;
  const double a1 = 0.1 / sq(s1 + eps), a2 = 0.6 / sq(s2 + eps), a3 = 0.3 / sq(s3 + eps);
  return (a1 * p1 + a2 * p2 + a3 * p3) / (a1 + a2 + a3);
}

}  // namespace

NodalField reinitialize(const UnitCellMesh& mesh, const NodalField& phi, int sub_iterations) {
  if (!has_interface(phi)) {
    throw DegenerateLevelSet("cannot reinitialize a level set without a zero crossing");
  }
  const int n = mesh.n();
  const double dx = mesh.dx();
  const double inv_dx = 1.0 / dx;
  const double floor = 1e-6 * dx;

  // Second-order ENO Godunov scheme with the interface held fixed: where a
  // grid neighbour has the opposite sign, the one-sided difference uses the
  // subcell zero of the input instead of the neighbour value.
  struct Subcell {
    int k;
    std::array<double, 4> s;  // +x, -x, +y, -y; dx when no crossing
    double dt;
  };
  std::vector<Subcell> subcell;
  std::vector<int> subcell_of(phi.size(), -1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int k = j * n + i;
      const double c = phi[k];
      const int nb[4] = {mesh.grid_dof(i + 1, j), mesh.grid_dof(i - 1, j), mesh.grid_dof(i, j + 1),
                         mesh.grid_dof(i, j - 1)};
      const int far[4] = {mesh.grid_dof(i + 2, j), mesh.grid_dof(i - 2, j), mesh.grid_dof(i, j + 2),
                          mesh.grid_dof(i, j - 2)};
      Subcell cell{k, {dx, dx, dx, dx}, 0.0};
      bool any = false;
      for (int q = 0; q < 4; ++q) {
        const double v = phi[nb[q]];
        if (c == 0.0 || c * v >= 0.0) continue;
        const double here = (phi[nb[q]] - 2.0 * c + phi[nb[q ^ 1]]) * inv_dx * inv_dx;
        const double there = (phi[far[q]] - 2.0 * v + c) * inv_dx * inv_dx;
        cell.s[q] = std::max(root_distance(c, v, minmod(here, there), dx), floor);
        any = true;
      }
      if (c == 0.0) {
        cell.s = {floor, floor, floor, floor};
        any = true;
      }
      if (!any) continue;
      cell.dt = 0.45 * *std::min_element(cell.s.begin(), cell.s.end());
      subcell_of[k] = static_cast<int>(subcell.size());
      subcell.push_back(cell);
    }
  }

  NodalField d = phi;
  NodalField next(phi.size());
  for (int it = 0; it < sub_iterations; ++it) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int k = j * n + i;
        const double c = d[k];
        const double sgn = phi[k] > 0.0 ? 1.0 : (phi[k] < 0.0 ? -1.0 : 0.0);
        if (sgn == 0.0) {
          next[k] = 0.0;
          continue;
        }
        const int xp = mesh.grid_dof(i + 1, j), xm = mesh.grid_dof(i - 1, j);
        const int yp = mesh.grid_dof(i, j + 1), ym = mesh.grid_dof(i, j - 1);
        const double dxx = (d[xp] - 2.0 * c + d[xm]) * inv_dx * inv_dx;
        const double dyy = (d[yp] - 2.0 * c + d[ym]) * inv_dx * inv_dx;
        const double dxx_p = (d[mesh.grid_dof(i + 2, j)] - 2.0 * d[xp] + c) * inv_dx * inv_dx;
        const double dxx_m = (c - 2.0 * d[xm] + d[mesh.grid_dof(i - 2, j)]) * inv_dx * inv_dx;
        const double dyy_p = (d[mesh.grid_dof(i, j + 2)] - 2.0 * d[yp] + c) * inv_dx * inv_dx;
        const double dyy_m = (c - 2.0 * d[ym] + d[mesh.grid_dof(i, j - 2)]) * inv_dx * inv_dx;

        const Subcell* cell = subcell_of[k] >= 0 ? &subcell[subcell_of[k]] : nullptr;
        double dpx, dmx, dpy, dmy;
        if (cell != nullptr) {
          auto forward = [&](int q, double value, double mm) {
            const double s = cell->s[q];
            if (s < dx) return (0.0 - c) / s - 0.5 * s * mm;
            return (value - c) / dx - 0.5 * dx * mm;
          };
          auto backward = [&](int q, double value, double mm) {
            const double s = cell->s[q];
            if (s < dx) return (c - 0.0) / s + 0.5 * s * mm;
            return (c - value) / dx + 0.5 * dx * mm;
          };
          dpx = forward(0, d[xp], minmod(dxx, dxx_p));
          dmx = backward(1, d[xm], minmod(dxx, dxx_m));
          dpy = forward(2, d[yp], minmod(dyy, dyy_p));
          dmy = backward(3, d[ym], minmod(dyy, dyy_m));
        } else {
          // Divided differences d[i+m+1] - d[i+m] for m = -3 .. 2 along each axis.
          double ex[6], ey[6];
          for (int m = -3; m <= 2; ++m) {
            ex[m + 3] = (d[mesh.grid_dof(i + m + 1, j)] - d[mesh.grid_dof(i + m, j)]) * inv_dx;
            ey[m + 3] = (d[mesh.grid_dof(i, j + m + 1)] - d[mesh.grid_dof(i, j + m)]) * inv_dx;
          }
          dmx = weno5(ex[0], ex[1], ex[2], ex[3], ex[4]);
          dpx = weno5(ex[5], ex[4], ex[3], ex[2], ex[1]);
          dmy = weno5(ey[0], ey[1], ey[2], ey[3], ey[4]);
          dpy = weno5(ey[5], ey[4], ey[3], ey[2], ey[1]);
        }
        double gx, gy;
        if (sgn > 0.0) {
          gx = std::max(std::max(dmx, 0.0), -std::min(dpx, 0.0));
          gy = std::max(std::max(dmy, 0.0), -std::min(dpy, 0.0));
        } else {
          gx = std::max(-std::min(dmx, 0.0), std::max(dpx, 0.0));
          gy = std::max(-std::min(dmy, 0.0), std::max(dpy, 0.0));
        }
        const double dt = cell != nullptr ? cell->dt : 0.45 * dx;
        next[k] = c - dt * sgn * (std::sqrt(gx * gx + gy * gy) - 1.0);
      }
    }
    d.swap(next);
  }
  return d;
}

}  // namespace auxcell
