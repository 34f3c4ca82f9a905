#include "flux/emergence.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "flux/evolve.hpp"
#include "flux/observables.hpp"

namespace flux {

double CellDecomposition::total_flux() const {
  double acc = 0.0;
  for (const auto& c : cells) acc += c.flux;
  return acc;
}

CellDecomposition decompose_field(const std::function<double(double, double)>& B,
                                  const Rect& domain, double dx, double dy, int M, int N,
                                  const PhysicalParams& params) {
  if (!(dx > 0.0) || !(dy > 0.0))
    throw std::invalid_argument("decompose_field: cell sizes must be positive");
  if (M < 1 || N < 1) throw std::invalid_argument("decompose_field: M, N must be >= 1");
  const double wx = domain.x1 - domain.x0, wy = domain.y1 - domain.y0;
  const int ncx = static_cast<int>(std::lround(wx / dx));
  const int ncy = static_cast<int>(std::lround(wy / dy));
  if (ncx < 1 || ncy < 1 || std::abs(ncx * dx - wx) > 1e-9 * wx ||
      std::abs(ncy * dy - wy) > 1e-9 * wy)
    throw std::invalid_argument("decompose_field: cells must tile the domain");

  const double half_fluxon = 0.5 * std::abs(params.fluxon());
  CellDecomposition out;
  out.dx = dx;
  out.dy = dy;
  out.M = M;
  out.N = N;
  out.cells.reserve(static_cast<size_t>(ncx) * ncy);
  for (int ix = 0; ix < ncx; ++ix)
    for (int iy = 0; iy < ncy; ++iy) {
      FieldCell cell;
      cell.cx = domain.x0 + (ix + 0.5) * dx;
      cell.cy = domain.y0 + (iy + 0.5) * dy;
      cell.dx = dx;
      cell.dy = dy;
      cell.B = B(cell.cx, cell.cy);
      cell.flux = cell.B * dx * dy;
      cell.M = M;
      cell.N = N;
      if (std::abs(cell.flux) / (M * N) >= half_fluxon)
        throw std::invalid_argument("decompose_field: per-point flux reaches half a fluxon");
      out.cells.push_back(cell);
    }
  return out;
}

Vec2 cell_kick(const FieldCell& cell, int n1, int n2, const PhysicalParams& params) {
  if (n1 < 0 || n1 > cell.M || n2 < 0 || n2 > cell.N)
    throw std::invalid_argument("cell_kick: crossing counts outside the ledger range");
  const double qB = params.q * cell.B;
  return Vec2{qB * (static_cast<double>(n1) / cell.M) * cell.dy,
              -qB * (static_cast<double>(n2) / cell.N) * cell.dx};
}

Vec2 emergent_force(const Vec2& v, double B, const PhysicalParams& params) {
  const double qB = params.q * B;
  return Vec2{qB * v.y, -qB * v.x};
}

void EmergenceConfig::validate() const {
  if (!(grid_L > 0.0) || !(a > 0.0) || !(half_width > 0.0))
    throw std::invalid_argument("EmergenceConfig: geometry must be positive");
  const double ratio = grid_L / a;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9)
    throw std::invalid_argument("EmergenceConfig: grid_L must be an integer multiple of a");
  if (sigma < 8.0 * grid_L)
    throw std::invalid_argument(
        "EmergenceConfig: packet must spread over at least 8 flux-line spacings");
  if (alpha != 0.0 && sigma * std::abs(alpha) > 0.2)
    throw std::invalid_argument(
        "EmergenceConfig: packet spread too large for the field variation scale");
  if (!(duration > 0.0) || !(dt > 0.0) || sample_every < 1)
    throw std::invalid_argument("EmergenceConfig: bad run controls");
}

EmergenceReport run_emergence_experiment(const EmergenceConfig& cfg,
                                         const PhysicalParams& params) {
  cfg.validate();
  const int n_side = static_cast<int>(std::lround(2.0 * cfg.half_width / cfg.a)) - 1;
  LatticeGrid grid(n_side, n_side, cfg.a, Boundary::HardWall, Boundary::HardWall);

  auto B_at = [&](double x, double) { return cfg.B0 * (1.0 + cfg.alpha * x); };

  // One flux line per grid_L x grid_L square, carrying the local midpoint flux.
  std::vector<GaugeSpec> lines;
  const auto positions =
      flux_line_positions(FluxGrid{1.0, cfg.grid_L, 0.0, 0.0}, grid);
  const double half_fluxon = 0.5 * std::abs(params.fluxon());
  for (const auto& [px, py] : positions) {
    const double flux = B_at(px, py) * cfg.grid_L * cfg.grid_L;
    if (std::abs(flux) >= half_fluxon)
      throw std::invalid_argument("run_emergence_experiment: per-line flux reaches half a fluxon");
    if (flux != 0.0) lines.push_back(FluxLine{flux, px, py});
  }
  const LinkPhaseField links = compile_gauge(std::span<const GaugeSpec>(lines), grid, params);
  const SparseOperator op = build_hamiltonian(grid, links, params);

  GaussianPacketSpec packet;
  packet.x0 = cfg.x0;
  packet.y0 = cfg.y0;
  packet.kx = params.m * cfg.vx / params.hbar;
  packet.ky = params.m * cfg.vy / params.hbar;
  packet.sigma_x = cfg.sigma;
  packet.sigma_y = cfg.sigma;
  QuantumState psi = gaussian_packet(packet, grid, params);

  EmergenceReport report;
  report.flux_lines = static_cast<double>(lines.size());

  EvolveOptions opts;
  opts.dt = cfg.dt;
  opts.steps = static_cast<int>(std::lround(cfg.duration / cfg.dt));
  opts.solver_tol = cfg.solver_tol;
  opts.solver_max_iters = cfg.solver_max_iters;
  opts.sample_every = cfg.sample_every;
  opts.observer = [&](int, double t, const QuantumState& s) {
    ObservableReport m = measure(s, op, grid.x_lo());
    auto [rx, ry] = s.mean_position();
    auto [wx, wy] = s.widths();
    report.samples.push_back({t, rx, ry, m.px_kin, m.py_kin, wx, wy, m.norm2});
  };
  evolve(psi, op, opts);

  // Centered differences of <p> over a window of several line crossings.
  const double speed = std::hypot(cfg.vx, cfg.vy);
  const double dt_sample = cfg.sample_every * cfg.dt;
  int w = 1;
  if (speed > 0.0)
    w = std::max(1, static_cast<int>(std::lround(
                        cfg.deriv_window_crossings * cfg.grid_L / speed / (2.0 * dt_sample))));
  const int n = static_cast<int>(report.samples.size());
  const double width0 = std::hypot(report.samples.front().width_x, report.samples.front().width_y);

  for (int s = w; s + w < n; ++s) {
    const auto& lo = report.samples[s - w];
    const auto& hi = report.samples[s + w];
    const auto& mid = report.samples[s];
    const double wmid = std::hypot(mid.width_x, mid.width_y);
    if (wmid > cfg.spread_budget * width0) break;

    ForceSample f;
    f.t = mid.t;
    f.measured = Vec2{(hi.px - lo.px) / (hi.t - lo.t), (hi.py - lo.py) / (hi.t - lo.t)};
    const Vec2 v{mid.px / params.m, mid.py / params.m};
    f.predicted = emergent_force(v, B_at(mid.rx, mid.ry), params);
    const double dev = std::hypot(f.measured.x - f.predicted.x, f.measured.y - f.predicted.y);
    const double denom = std::hypot(f.predicted.x, f.predicted.y);
    f.rel_dev = denom > 1e-12 ? dev / denom : dev;
    report.force.push_back(f);
    report.max_abs_force_dev = std::max(report.max_abs_force_dev, dev);
    if (denom > 1e-12) report.max_rel_force_dev = std::max(report.max_rel_force_dev, f.rel_dev);
  }

  // Pre-spreading sample count and circle fit of the mean trajectory.
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : report.samples) {
    if (std::hypot(s.width_x, s.width_y) > cfg.spread_budget * width0) break;
    pts.emplace_back(s.rx, s.ry);
  }
  report.pre_spread_samples = static_cast<int>(pts.size());

  if (cfg.B0 != 0.0 && cfg.alpha == 0.0 && pts.size() >= 8) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const auto& [x, y] : pts) {
      const double z = x * x + y * y;
      const Eigen::Vector3d row(x, y, 1.0);
      A += row * row.transpose();
      b -= z * row;
    }
    const Eigen::Vector3d sol = A.ldlt().solve(b);
    const double R2 = 0.25 * (sol[0] * sol[0] + sol[1] * sol[1]) - sol[2];
    report.fitted_radius = R2 > 0.0 ? std::sqrt(R2) : 0.0;
    report.reference_radius = params.m * speed / std::abs(params.q * cfg.B0);
  }
  return report;
}

}  // namespace flux
