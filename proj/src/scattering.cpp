#include "flux/scattering.hpp"

#include <cmath>
#include <numbers>

namespace flux {

double DiffractionSpectrum::comb_position(int order) const {
  return 2.0 * std::numbers::pi * hbar * order / L - q * phi_B;
}

double DiffractionSpectrum::worst_comb_offset_bins() const {
  double worst = 0.0;
  for (const auto& p : peaks)
    worst = std::max(worst, std::abs(p.dp_y - comb_position(p.order)) / bin_width);
  return worst;
}

DiffractionSpectrum momentum_transfer_spectrum(const QuantumState& state,
                                               const LinkPhaseField& links, double L,
                                               double ky_incident, const PhysicalParams& params,
                                               const DiffractionOptions& opts) {
  const LatticeGrid& g = state.grid();
  if (!g.periodic_y())
    throw std::invalid_argument("momentum_transfer_spectrum: requires periodic y");
  const double period_y = g.ny * g.a;
  const double n_periods_d = period_y / L;
  const int n_periods = static_cast<int>(std::lround(n_periods_d));
  if (n_periods < 1 || std::abs(n_periods_d - n_periods) > 1e-9 * n_periods_d)
    throw std::invalid_argument(
        "momentum_transfer_spectrum: transverse span must hold a whole number of periods");

  DiffractionSpectrum spec;
  spec.bin_width = 2.0 * std::numbers::pi * params.hbar / period_y;
  spec.L = L;
  spec.hbar = params.hbar;
  spec.q = params.q;
  spec.transmitted_weight = state.probability_right_of(opts.x_cut);
  if (spec.transmitted_weight < opts.min_transmitted)
    throw std::invalid_argument("momentum_transfer_spectrum: packet not past the lattice yet");

  // Parallel-transport the transmitted columns to the j = 0 row so the plain
  // Fourier modes are kinematic momenta. The transported phase must close
  // around the period, otherwise the kinematic comb is not resolvable on this
  // grid.
  int i_start = g.nx;
  for (int i = 0; i < g.nx; ++i)
    if (g.x(i) > opts.x_cut) { i_start = i; break; }
  if (i_start == g.nx)
    throw std::invalid_argument("momentum_transfer_spectrum: cut beyond the grid");

  double total_phase = 0.0;
  for (int j = 0; j < g.n_links_y(); ++j) total_phase += links.phase_y(g.nx - 1, j);
  const double closure = std::remainder(total_phase, 2.0 * std::numbers::pi);
  if (std::abs(closure) > 1e-9)
    throw std::invalid_argument(
        "momentum_transfer_spectrum: transported phase does not close over the period");
  spec.phi_B = params.hbar * (total_phase / period_y) / params.q;

  const int nxr = g.nx - i_start;
  Eigen::MatrixXcd transported(g.ny, nxr);
  for (int c = 0; c < nxr; ++c) {
    const int i = i_start + c;
    double theta = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      transported(j, c) = state.at(i, j) * std::polar(1.0, -theta);
      if (j < g.n_links_y()) theta += links.phase_y(i, j);
    }
  }

  // Unitary DFT in y; weight per mode summed over the transmitted columns.
  std::vector<double> weight(g.ny, 0.0);
  Eigen::VectorXcd col(g.ny);
  Eigen::MatrixXcd F(g.ny, g.ny);
  const double norm = 1.0 / std::sqrt(static_cast<double>(g.ny));
  for (int m = 0; m < g.ny; ++m)
    for (int j = 0; j < g.ny; ++j)
      F(m, j) = norm * std::polar(1.0, -2.0 * std::numbers::pi * m * j / g.ny);
  Eigen::MatrixXcd modes = F * transported;
  const double cell = state.cell_area();
  for (int m = 0; m < g.ny; ++m) weight[m] = modes.row(m).squaredNorm() * cell;

  // Peak detection: cyclic local maxima above the floor.
  const double qphi = params.q * spec.phi_B;
  for (int m = 0; m < g.ny; ++m) {
    const double w = weight[m];
    if (w < opts.noise_floor) continue;
    const double wl = weight[(m + g.ny - 1) % g.ny];
    const double wr = weight[(m + 1) % g.ny];
    if (w < wl || w < wr) continue;
    const int wrapped = (m <= g.ny / 2) ? m : m - g.ny;
    const double k = 2.0 * std::numbers::pi * wrapped / period_y;
    DiffractionPeak peak;
    peak.dp_y = params.hbar * (k - ky_incident);
    peak.order = static_cast<int>(std::lround((peak.dp_y + qphi) * L /
                                              (2.0 * std::numbers::pi * params.hbar)));
    peak.weight = w;
    spec.peaks.push_back(peak);
  }
  return spec;
}

double minimum_deflection(double Phi_B, double L, const PhysicalParams& params) {
  if (!(L > 0.0)) throw std::invalid_argument("minimum_deflection: L must be positive");
  const double phi = reduce_flux(Phi_B, params);
  const double phi0 = std::abs(params.fluxon());
  if (phi <= 0.5 * phi0) return params.q * phi / L;
  return 2.0 * std::numbers::pi * params.hbar / L - params.q * phi / L;
}

double step_transmission_oracle(double kx, double ky, double phi_B,
                                const PhysicalParams& params) {
  if (!(kx > 0.0)) throw std::invalid_argument("step_transmission_oracle: kx must be positive");
  const double qp = params.q * phi_B;
  const double V = (qp * qp - 2.0 * qp * params.hbar * ky) / (2.0 * params.m);
  const double Ex = params.hbar * params.hbar * kx * kx / (2.0 * params.m);
  if (Ex <= V) return 0.0;
  const double kprime = std::sqrt(2.0 * params.m * (Ex - V)) / params.hbar;
  const double s = kx + kprime;
  return 4.0 * kx * kprime / (s * s);
}

bool guaranteed_reflection_quantum(double Px2, double Py2, double phi_B,
                                   const PhysicalParams& params) {
  return std::sqrt(Px2 + Py2) < 0.5 * std::abs(params.q * phi_B);
}

}  // namespace flux
