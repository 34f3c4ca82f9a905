#pragma once

#include <functional>
#include <vector>

#include "flux/hamiltonian.hpp"

namespace flux {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// One differential cell of a decomposed field: uniform B over dx * dy,
/// modeled as an M x N sub-grid of point fluxes.
struct FieldCell {
  double cx = 0.0, cy = 0.0;  ///< cell center
  double dx = 0.0, dy = 0.0;
  double B = 0.0;             ///< midpoint sample
  double flux = 0.0;          ///< B * dx * dy
  int M = 1, N = 1;
};

struct CellDecomposition {
  std::vector<FieldCell> cells;
  double dx = 0.0, dy = 0.0;
  int M = 1, N = 1;
  double total_flux() const;
};

/// Midpoint decomposition of B(x, y) over `domain` into dx * dy cells, each
/// standing for an M x N grid of point fluxes of flux / (M N) each. Throws
/// when a per-point flux would reach half a fluxon.
CellDecomposition decompose_field(const std::function<double(double, double)>& B,
                                  const Rect& domain, double dx, double dy, int M, int N,
                                  const PhysicalParams& params);

/// Momentum kicks accumulated while crossing n1 of the M layers that advance
/// y and n2 of the N layers that advance x:
/// dp = (q B (n1/M) dy, -q B (n2/N) dx).
Vec2 cell_kick(const FieldCell& cell, int n1, int n2, const PhysicalParams& params);

/// Coarse-grained force q v x B for B = B z-hat: (q B v_y, -q B v_x).
Vec2 emergent_force(const Vec2& v, double B, const PhysicalParams& params);

struct EmergenceConfig {
  double B0 = 1.0;      ///< uniform field target
  double alpha = 0.0;   ///< optional gradient: B(x) = B0 (1 + alpha x)
  double grid_L = 0.05; ///< flux-line spacing
  double a = 0.025;     ///< lattice spacing (grid_L / a must be an integer)
  double half_width = 4.0;  ///< hard-wall square half-size

  double x0 = -1.0, y0 = 0.0;
  double vx = 0.0, vy = 1.0;  ///< mean velocity of the packet
  double sigma = 0.7071067811865476;  ///< isotropic width; 1/sqrt(2) magnetic lengths keeps it rigid

  double duration = 3.2;
  double dt = 4e-3;
  int sample_every = 12;
  double deriv_window_crossings = 10.0;  ///< smoothing window in line crossings
  double spread_budget = 1.5;            ///< drop samples once width grows past this factor
  double solver_tol = 1e-12;
  int solver_max_iters = 2000;

  void validate() const;
};

struct EmergenceSample {
  double t = 0.0;
  double rx = 0.0, ry = 0.0;
  double px = 0.0, py = 0.0;  ///< kinematic
  double width_x = 0.0, width_y = 0.0;
  double norm2 = 0.0;
};

struct ForceSample {
  double t = 0.0;
  Vec2 measured;   ///< centered difference of <p>
  Vec2 predicted;  ///< q <v> x B(<r>)
  double rel_dev = 0.0;
};

struct EmergenceReport {
  std::vector<EmergenceSample> samples;
  std::vector<ForceSample> force;
  double fitted_radius = 0.0;     ///< circle fit of <r>(t) (uniform B only)
  double reference_radius = 0.0;  ///< m |v| / |q B|
  double max_rel_force_dev = 0.0;
  double max_abs_force_dev = 0.0;
  int pre_spread_samples = 0;  ///< samples inside the width budget
  double flux_lines = 0.0;
};

/// Build the flux grid for the target field, evolve the packet, and compare
/// the coarse-grained d<p>/dt against q <v> x B(<r>).
EmergenceReport run_emergence_experiment(const EmergenceConfig& cfg,
                                         const PhysicalParams& params);

}  // namespace flux
