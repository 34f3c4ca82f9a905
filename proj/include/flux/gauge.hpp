#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "flux/grid.hpp"
#include "flux/params.hpp"

namespace flux {

/// Declarative field configurations. Fluxes are stored at full precision;
/// periodicity reduction happens only where it is being tested.
struct UniformWall {
  double phi_B = 0.0;  ///< flux per unit transverse length
  double x0 = 0.0;     ///< wall position (center of the slab)
  double w = 0.0;      ///< slab width; 0 means widthless
};

struct FluxLine {
  double Phi_B = 0.0;  ///< flux carried by the line
  double x0 = 0.0;     ///< must coincide with a plaquette center
  double y0 = 0.0;
};

/// Column of flux lines at x0, spaced L along y.
struct FluxLineLattice {
  double Phi_B = 0.0;
  double L = 0.0;
  double x0 = 0.0;
};

/// Square grid of flux lines covering the whole domain.
struct FluxGrid {
  double Phi_B = 0.0;
  double L = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
};

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

struct UniformField {
  double B = 0.0;               ///< flux per unit area
  std::optional<Rect> region;   ///< whole domain when absent
};

using GaugeSpec = std::variant<UniformWall, FluxLine, FluxLineLattice, FluxGrid, UniformField>;

/// Peierls phases per lattice link, in radians. phase_x(i, j) belongs to the
/// link (i, j) -> (i+1, j); phase_y(i, j) to (i, j) -> (i, j+1). The oriented
/// sum around any plaquette equals q * (enclosed flux) / hbar.
class LinkPhaseField {
 public:
  LinkPhaseField() = default;
  explicit LinkPhaseField(const LatticeGrid& grid);

  const LatticeGrid& grid() const { return grid_; }

  double phase_x(int i, int j) const { return px_[i * grid_.ny + j]; }
  double phase_y(int i, int j) const { return py_[i * grid_.n_links_y() + j]; }
  double& phase_x(int i, int j) { return px_[i * grid_.ny + j]; }
  double& phase_y(int i, int j) { return py_[i * grid_.n_links_y() + j]; }

  bool all_zero(double tol = 0.0) const;

  /// Accumulate another field compiled on the same grid (fluxes add).
  LinkPhaseField& add(const LinkPhaseField& other);

  /// Oriented phase sum around plaquette (i, j), counterclockwise, raw (not
  /// reduced).
  double holonomy(int i, int j) const;

 private:
  LatticeGrid grid_;
  std::vector<double> px_;  // (nx-1 or nx) * ny
  std::vector<double> py_;  // nx * (ny-1 or ny)
};

/// Compile a field spec into link phases. Flux lines must sit at plaquette
/// centers; the branch cut of each line runs in +x from the line, so the
/// vertical links at x > x0 in the line's plaquette row carry q*Phi_B/hbar.
LinkPhaseField compile_gauge(const GaugeSpec& spec, const LatticeGrid& grid,
                             const PhysicalParams& params);
LinkPhaseField compile_gauge(std::span<const GaugeSpec> specs, const LatticeGrid& grid,
                             const PhysicalParams& params);

/// Flux enclosed by plaquette (i, j), reduced to [0, fluxon).
double plaquette_flux(const LinkPhaseField& field, int i, int j, const PhysicalParams& params);

/// Gauge transformation by per-site phases chi: each link phase picks up
/// chi(head) - chi(tail). Observables must not change.
void apply_site_regauge(LinkPhaseField& field, std::span<const double> chi);

/// Plaquette-center coordinates of every flux line a spec would place (empty
/// for continuous specs). Used by diagnostics and scenario metadata.
std::vector<std::pair<double, double>> flux_line_positions(const GaugeSpec& spec,
                                                           const LatticeGrid& grid);

}  // namespace flux
