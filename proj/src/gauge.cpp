#include "flux/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flux {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Plaquette flux targets in radians (q * Phi / hbar), indexed like plaquettes.
struct PlaquetteFluxMap {
  const LatticeGrid* grid = nullptr;
  std::vector<double> f;  // n_plaq_x * n_plaq_y
  double& at(int i, int j) { return f[i * grid->n_plaq_y() + j]; }
  double at(int i, int j) const { return f[i * grid->n_plaq_y() + j]; }
};

int plaq_index_x(const LatticeGrid& g, double x) {
  return static_cast<int>(std::lround((x - g.x_min) / g.a - 0.5));
}
int plaq_index_y(const LatticeGrid& g, double y) {
  return static_cast<int>(std::lround((y - g.y_min) / g.a - 0.5));
}

void require_plaq_center(const LatticeGrid& g, double x0, double y0, int i, int j) {
  const double tol = 1e-6 * g.a;
  if (i < 0 || i >= g.n_plaq_x() || j < 0 || j >= g.n_plaq_y())
    throw std::invalid_argument("gauge spec outside grid: flux line not inside the domain");
  if (std::abs(g.plaq_center_x(i) - x0) > tol || std::abs(g.plaq_center_y(j) - y0) > tol)
    throw std::invalid_argument("flux line must sit at a plaquette center");
}

int as_link_multiple(const LatticeGrid& g, double L, const char* what) {
  const double ratio = L / g.a;
  const int p = static_cast<int>(std::lround(ratio));
  if (p < 1 || std::abs(ratio - p) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument(std::string(what) + " spacing must be a positive integer multiple of the lattice spacing");
  return p;
}

/// Solve 2 r ≡ target (mod p); returns -1 when unsolvable. Used to place a
/// line column symmetrically under the site reflection j -> ny-1-j.
int solve_symmetric_row(int target, int p) {
  target = ((target % p) + p) % p;
  if (p % 2 == 1) {
    const int inv2 = (p + 1) / 2;
    return (target * inv2) % p;
  }
  if (target % 2 != 0) return -1;
  return (target / 2) % p;
}

int lattice_row_offset(const LatticeGrid& g, int p) {
  const int r0 = solve_symmetric_row(g.ny - 2, p);
  return r0 >= 0 ? r0 : 0;
}

void add_line(PlaquetteFluxMap& m, int i, int j, double radians) { m.at(i, j) += radians; }

void fill_uniform_wall(PlaquetteFluxMap& m, const UniformWall& wall, const LatticeGrid& g,
                       const PhysicalParams& p) {
  if (wall.w < 0.0) throw std::invalid_argument("uniform-wall: width must be >= 0");
  const double lo = wall.x0 - 0.5 * wall.w;
  const double hi = wall.x0 + 0.5 * wall.w;
  if (lo <= g.x_lo() || hi >= g.x_hi())
    throw std::invalid_argument("gauge spec outside grid: wall slab must lie inside the domain");
  const double scale = p.q / p.hbar;
  if (wall.w == 0.0) {
    const int i0 = static_cast<int>(std::floor((wall.x0 - g.x_min) / g.a));
    if (i0 < 0 || i0 >= g.n_plaq_x())
      throw std::invalid_argument("gauge spec outside grid: wall position");
    for (int j = 0; j < g.n_plaq_y(); ++j) m.at(i0, j) += scale * wall.phi_B * g.a;
    return;
  }
  const double B = wall.phi_B / wall.w;
  for (int i = 0; i < g.n_plaq_x(); ++i) {
    const double cx0 = g.x(i), cx1 = g.x(i) + g.a;
    const double overlap = std::max(0.0, std::min(cx1, hi) - std::max(cx0, lo));
    if (overlap <= 0.0) continue;
    const double flux = B * overlap * g.a;
    for (int j = 0; j < g.n_plaq_y(); ++j) m.at(i, j) += scale * flux;
  }
}

void fill_flux_line(PlaquetteFluxMap& m, const FluxLine& line, const LatticeGrid& g,
                    const PhysicalParams& p) {
  const int i = plaq_index_x(g, line.x0);
  const int j = plaq_index_y(g, line.y0);
  require_plaq_center(g, line.x0, line.y0, i, j);
  add_line(m, i, j, p.q * line.Phi_B / p.hbar);
}

void fill_flux_line_lattice(PlaquetteFluxMap& m, const FluxLineLattice& lat,
                            const LatticeGrid& g, const PhysicalParams& p) {
  const int period = as_link_multiple(g, lat.L, "flux-line lattice");
  const int i = plaq_index_x(g, lat.x0);
  if (i < 0 || i >= g.n_plaq_x())
    throw std::invalid_argument("gauge spec outside grid: lattice column");
  if (g.periodic_y() && g.ny % period != 0)
    throw std::invalid_argument("flux-line lattice: periodic span must hold a whole number of periods");
  const int r0 = lattice_row_offset(g, period);
  const double radians = p.q * lat.Phi_B / p.hbar;
  for (int j = r0 % period; j < g.n_plaq_y(); j += period) add_line(m, i, j, radians);
}

void fill_flux_grid(PlaquetteFluxMap& m, const FluxGrid& fg, const LatticeGrid& g,
                    const PhysicalParams& p) {
  if (!(fg.Phi_B < 0.5 * std::abs(p.fluxon())))
    throw std::invalid_argument("flux-grid: per-line flux must be below half a fluxon");
  const int period = as_link_multiple(g, fg.L, "flux-grid");
  const int i0 = ((plaq_index_x(g, fg.origin_x) % period) + period) % period;
  const int j0 = ((plaq_index_y(g, fg.origin_y) % period) + period) % period;
  const double radians = p.q * fg.Phi_B / p.hbar;
  for (int i = i0; i < g.n_plaq_x(); i += period)
    for (int j = j0; j < g.n_plaq_y(); j += period) add_line(m, i, j, radians);
}

void fill_uniform_field(PlaquetteFluxMap& m, const UniformField& uf, const LatticeGrid& g,
                        const PhysicalParams& p) {
  const double radians = p.q * uf.B * g.a * g.a / p.hbar;
  for (int i = 0; i < g.n_plaq_x(); ++i)
    for (int j = 0; j < g.n_plaq_y(); ++j) {
      if (uf.region && !uf.region->contains(g.plaq_center_x(i), g.plaq_center_y(j))) continue;
      m.at(i, j) += radians;
    }
}

}  // namespace

LinkPhaseField::LinkPhaseField(const LatticeGrid& grid)
    : grid_(grid),
      px_(static_cast<size_t>(grid.n_links_x()) * grid.ny, 0.0),
      py_(static_cast<size_t>(grid.nx) * grid.n_links_y(), 0.0) {}

bool LinkPhaseField::all_zero(double tol) const {
  auto ok = [tol](double v) { return std::abs(v) <= tol; };
  return std::all_of(px_.begin(), px_.end(), ok) && std::all_of(py_.begin(), py_.end(), ok);
}

LinkPhaseField& LinkPhaseField::add(const LinkPhaseField& other) {
  if (other.px_.size() != px_.size() || other.py_.size() != py_.size())
    throw std::invalid_argument("LinkPhaseField::add: grids do not match");
  for (size_t k = 0; k < px_.size(); ++k) px_[k] += other.px_[k];
  for (size_t k = 0; k < py_.size(); ++k) py_[k] += other.py_[k];
  return *this;
}

double LinkPhaseField::holonomy(int i, int j) const {
  const int ip = (i + 1) % grid_.nx;
  const int jp = (j + 1) % grid_.ny;
  return phase_x(i, j) + phase_y(ip, j) - phase_x(i, jp) - phase_y(i, j);
}

LinkPhaseField compile_gauge(const GaugeSpec& spec, const LatticeGrid& grid,
                             const PhysicalParams& params) {
  return compile_gauge(std::span<const GaugeSpec>(&spec, 1), grid, params);
}

LinkPhaseField compile_gauge(std::span<const GaugeSpec> specs, const LatticeGrid& grid,
                             const PhysicalParams& params) {
  params.validate();
  grid.validate();
  PlaquetteFluxMap fluxes;
  fluxes.grid = &grid;
  fluxes.f.assign(static_cast<size_t>(grid.n_plaq_x()) * grid.n_plaq_y(), 0.0);
  for (const GaugeSpec& spec : specs) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, UniformWall>) fill_uniform_wall(fluxes, s, grid, params);
          else if constexpr (std::is_same_v<T, FluxLine>) fill_flux_line(fluxes, s, grid, params);
          else if constexpr (std::is_same_v<T, FluxLineLattice>) fill_flux_line_lattice(fluxes, s, grid, params);
          else if constexpr (std::is_same_v<T, FluxGrid>) fill_flux_grid(fluxes, s, grid, params);
          else fill_uniform_field(fluxes, s, grid, params);
        },
        spec);
  }

  const bool any_flux =
      std::any_of(fluxes.f.begin(), fluxes.f.end(), [](double v) { return v != 0.0; });
  if (grid.periodic_x() && any_flux)
    throw std::invalid_argument("compile_gauge: nonzero flux with periodic x is not supported");

  // Horizontal links stay phase-free; the vertical link (i, j) accumulates the
  // flux of every plaquette in its row to its left. A single line then puts
  // q*Phi/hbar on all vertical links to its right in its own row (branch cut
  // along +x), and a uniform field turns into a linear-in-x phase ramp.
  LinkPhaseField field(grid);
  for (int j = 0; j < grid.n_links_y(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
      field.phase_y(i, j) = acc;
      if (i < grid.n_plaq_x()) acc += fluxes.at(i, j);
    }
  }
  return field;
}

double plaquette_flux(const LinkPhaseField& field, int i, int j, const PhysicalParams& params) {
  const LatticeGrid& g = field.grid();
  if (i < 0 || i >= g.n_plaq_x() || j < 0 || j >= g.n_plaq_y())
    throw std::out_of_range("plaquette_flux: plaquette index out of range");
  const double phase = field.holonomy(i, j);
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r * params.hbar / params.q;
}

void apply_site_regauge(LinkPhaseField& field, std::span<const double> chi) {
  const LatticeGrid& g = field.grid();
  if (static_cast<int>(chi.size()) != g.n_sites())
    throw std::invalid_argument("apply_site_regauge: need one phase per site");
  for (int i = 0; i < g.n_links_x(); ++i)
    for (int j = 0; j < g.ny; ++j) {
      const int ip = (i + 1) % g.nx;
      field.phase_x(i, j) += chi[g.idx(ip, j)] - chi[g.idx(i, j)];
    }
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.n_links_y(); ++j) {
      const int jp = (j + 1) % g.ny;
      field.phase_y(i, j) += chi[g.idx(i, jp)] - chi[g.idx(i, j)];
    }
}

std::vector<std::pair<double, double>> flux_line_positions(const GaugeSpec& spec,
                                                           const LatticeGrid& grid) {
  std::vector<std::pair<double, double>> out;
  if (const auto* line = std::get_if<FluxLine>(&spec)) {
    out.emplace_back(line->x0, line->y0);
  } else if (const auto* lat = std::get_if<FluxLineLattice>(&spec)) {
    const int period = as_link_multiple(grid, lat->L, "flux-line lattice");
    const int i = plaq_index_x(grid, lat->x0);
    const int r0 = lattice_row_offset(grid, period);
    for (int j = r0 % period; j < grid.n_plaq_y(); j += period)
      out.emplace_back(grid.plaq_center_x(i), grid.plaq_center_y(j));
  } else if (const auto* fg = std::get_if<FluxGrid>(&spec)) {
    const int period = as_link_multiple(grid, fg->L, "flux-grid");
    const int i0 = ((plaq_index_x(grid, fg->origin_x) % period) + period) % period;
    const int j0 = ((plaq_index_y(grid, fg->origin_y) % period) + period) % period;
    for (int i = i0; i < grid.n_plaq_x(); i += period)
      for (int j = j0; j < grid.n_plaq_y(); j += period)
        out.emplace_back(grid.plaq_center_x(i), grid.plaq_center_y(j));
  }
  return out;
}

}  // namespace flux
