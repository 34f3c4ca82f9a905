#include "flux/grid.hpp"

namespace flux {

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::HardWall: return "hard-wall";
    case Boundary::Periodic: return "periodic";
    case Boundary::AbsorbingLayer: return "absorbing-layer";
  }
  return "?";
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "hard-wall") return Boundary::HardWall;
  if (s == "periodic") return Boundary::Periodic;
  if (s == "absorbing-layer") return Boundary::AbsorbingLayer;
  throw std::invalid_argument("unknown boundary kind: " + s);
}

LatticeGrid::LatticeGrid(int nx_, int ny_, double a_, Boundary bx, Boundary by)
    : nx(nx_), ny(ny_), a(a_), boundary_x(bx), boundary_y(by) {
  x_min = -0.5 * (nx - 1) * a;
  y_min = -0.5 * (ny - 1) * a;
  validate();
}

LatticeGrid LatticeGrid::centered(int nx, int ny, double a, Boundary bx, Boundary by) {
  return LatticeGrid(nx, ny, a, bx, by);
}

void LatticeGrid::validate() const {
  if (nx < 8 || ny < 8) throw std::invalid_argument("LatticeGrid: site counts must be >= 8");
  if (!(a > 0.0)) throw std::invalid_argument("LatticeGrid: spacing must be > 0");
  if (boundary_y == Boundary::AbsorbingLayer)
    throw std::invalid_argument("LatticeGrid: absorbing layer is only supported on x");
}

}  // namespace flux
