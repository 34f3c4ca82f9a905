#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flux {

enum class Boundary { HardWall, Periodic, AbsorbingLayer };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Uniform 2D lattice of sites. Site (i, j) sits at (x(i), y(j)).
///
/// Hard-wall boundaries behave as Dirichlet walls half a spacing beyond the
/// outermost sites, so a hard-wall box has width (n + 1) * a. A periodic y
/// direction has period ny * a. Absorbing layers are only available on x and
/// share the hard-wall geometry.
struct LatticeGrid {
  int nx = 0;
  int ny = 0;
  double a = 0.0;
  Boundary boundary_x = Boundary::HardWall;
  Boundary boundary_y = Boundary::HardWall;
  double x_min = 0.0;
  double y_min = 0.0;

  LatticeGrid() = default;
  LatticeGrid(int nx_, int ny_, double a_, Boundary bx, Boundary by);
  /// Centered variant: site lattice symmetric about the origin.
  static LatticeGrid centered(int nx, int ny, double a, Boundary bx, Boundary by);

  void validate() const;

  int n_sites() const { return nx * ny; }
  int idx(int i, int j) const { return i * ny + j; }
  double x(int i) const { return x_min + i * a; }
  double y(int j) const { return y_min + j * a; }

  bool periodic_x() const { return boundary_x == Boundary::Periodic; }
  bool periodic_y() const { return boundary_y == Boundary::Periodic; }

  /// Number of x-directed links per row / y-directed links per column.
  int n_links_x() const { return periodic_x() ? nx : nx - 1; }
  int n_links_y() const { return periodic_y() ? ny : ny - 1; }

  /// Plaquette (i, j) has corners (i, j), (i+1, j), (i+1, j+1), (i, j+1);
  /// indices wrap on periodic boundaries.
  int n_plaq_x() const { return periodic_x() ? nx : nx - 1; }
  int n_plaq_y() const { return periodic_y() ? ny : ny - 1; }
  double plaq_center_x(int i) const { return x_min + (i + 0.5) * a; }
  double plaq_center_y(int j) const { return y_min + (j + 0.5) * a; }

  /// Extent of the domain including the half-spacing wall margin.
  double width_x() const { return periodic_x() ? nx * a : (nx + 1) * a; }
  double width_y() const { return periodic_y() ? ny * a : (ny + 1) * a; }
  /// Position of the hard wall / domain edge.
  double x_lo() const { return periodic_x() ? x_min : x_min - a; }
  double x_hi() const { return x_lo() + width_x(); }
  double y_lo() const { return periodic_y() ? y_min : y_min - a; }
  double y_hi() const { return y_lo() + width_y(); }
};

}  // namespace flux
