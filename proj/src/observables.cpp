#include "flux/observables.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace flux {
namespace {

/// Transverse spectral weights |c(k)|^2 summed over x, one entry per mode.
/// Periodic y uses Fourier modes k_m = 2 pi m / (ny a); hard walls use the
/// sine modes k_n = pi n / ((ny+1) a).
struct TransverseModes {
  std::vector<double> k;
  std::vector<double> weight;  // sums to norm2
};

const Eigen::MatrixXcd& transform_matrix(const LatticeGrid& g) {
  static std::map<std::tuple<int, bool>, Eigen::MatrixXcd> cache;
  const auto key = std::make_tuple(g.ny, g.periodic_y());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXcd F(g.ny, g.ny);
  if (g.periodic_y()) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(g.ny));
    for (int m = 0; m < g.ny; ++m)
      for (int j = 0; j < g.ny; ++j)
        F(m, j) = norm * std::polar(1.0, -2.0 * std::numbers::pi * m * j / g.ny);
  } else {
    const double norm = std::sqrt(2.0 / (g.ny + 1));
    for (int n = 0; n < g.ny; ++n)
      for (int j = 0; j < g.ny; ++j)
        F(n, j) = norm * std::sin(std::numbers::pi * (n + 1) * (j + 1) / (g.ny + 1));
  }
  return cache.emplace(key, std::move(F)).first->second;
}

TransverseModes transverse_modes(const QuantumState& state) {
  const LatticeGrid& g = state.grid();
  const Eigen::MatrixXcd& F = transform_matrix(g);
  Eigen::Map<const Eigen::MatrixXcd> Psi(state.amplitudes().data(), g.ny, g.nx);
  Eigen::MatrixXcd C = F * Psi;

  TransverseModes modes;
  modes.k.resize(g.ny);
  modes.weight.resize(g.ny);
  const double cell = state.cell_area();
  for (int m = 0; m < g.ny; ++m) {
    if (g.periodic_y()) {
      const int wrapped = (m <= g.ny / 2) ? m : m - g.ny;
      modes.k[m] = 2.0 * std::numbers::pi * wrapped / (g.ny * g.a);
    } else {
      modes.k[m] = std::numbers::pi * (m + 1) / ((g.ny + 1) * g.a);
    }
    modes.weight[m] = C.row(m).squaredNorm() * cell;
  }
  return modes;
}

}  // namespace

ObservableReport measure(const QuantumState& state, const SparseOperator& op, double divider_x) {
  const LatticeGrid& g = state.grid();
  const PhysicalParams& p = state.params();
  const double cell = state.cell_area();
  const double hbar = p.hbar;

  ObservableReport r;
  r.norm2 = state.norm2();
  if (!(r.norm2 > 0.0)) throw std::invalid_argument("measure: zero-norm state");
  const double inv = 1.0 / r.norm2;

  r.energy = (state.amplitudes().dot(op.H * state.amplitudes()) * cell).real() * inv;

  auto amp = [&](int i, int j) -> Complex {
    if (g.periodic_x()) i = (i + g.nx) % g.nx;
    else if (i < 0 || i >= g.nx) return {0.0, 0.0};
    if (g.periodic_y()) j = (j + g.ny) % g.ny;
    else if (j < 0 || j >= g.ny) return {0.0, 0.0};
    return state.at(i, j);
  };
  auto phx = [&](int i, int j) -> double {  // phase of link (i,j)->(i+1,j), 0 off-grid
    if (i < 0 || i >= g.n_links_x()) return 0.0;
    return op.links.phase_x(i, j);
  };
  auto phy = [&](int i, int j) -> double {
    if (j < 0 || j >= g.n_links_y()) return 0.0;
    return op.links.phase_y(i, j);
  };

  // Canonical <Px>: plain central difference. <Px^2>: Dirichlet quadratic
  // form of the same stencil as the kinetic term.
  Complex px_acc = 0.0;
  double px2_acc = 0.0;
  Complex pxk_acc = 0.0, pyk_acc = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      const Complex c = std::conj(state.at(i, j));
      px_acc += c * (amp(i + 1, j) - amp(i - 1, j));
      // Covariant differences: the forward neighbor is transported back with
      // e^{-i phase}, matching the hopping convention.
      pxk_acc += c * (std::polar(1.0, -phx(i, j)) * amp(i + 1, j) -
                      std::polar(1.0, phx(i - 1, j)) * amp(i - 1, j));
      pyk_acc += c * (std::polar(1.0, -phy(i, j)) * amp(i, j + 1) -
                      std::polar(1.0, phy(i, j - 1)) * amp(i, j - 1));
      const Complex dfx = amp(i + 1, j) - amp(i, j);
      px2_acc += std::norm(dfx);
      if (i == 0 && !g.periodic_x()) px2_acc += std::norm(amp(i, j));
    }
  }
  const Complex mihalf(-0.0, -0.5);  // -i/2
  r.Px = (mihalf * px_acc).real() * hbar / g.a * cell * inv;
  r.Px2 = px2_acc * hbar * hbar / (g.a * g.a) * cell * inv;
  r.px_kin = (mihalf * pxk_acc).real() * hbar / g.a * cell * inv;
  r.py_kin = (mihalf * pyk_acc).real() * hbar / g.a * cell * inv;

  TransverseModes modes = transverse_modes(state);
  double py = 0.0, py2 = 0.0;
  for (size_t m = 0; m < modes.k.size(); ++m) {
    py += hbar * modes.k[m] * modes.weight[m];
    py2 += hbar * hbar * modes.k[m] * modes.k[m] * modes.weight[m];
  }
  if (g.periodic_y()) {
    r.Py = py * inv;
  } else {
    // Sine modes carry no orientation; use the central difference instead.
    Complex py_acc = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        py_acc += std::conj(state.at(i, j)) * (amp(i, j + 1) - amp(i, j - 1));
    r.Py = (mihalf * py_acc).real() * hbar / g.a * cell * inv;
  }
  r.Py2 = py2 * inv;

  r.prob_right = state.probability_right_of(divider_x);
  r.prob_left = r.norm2 - r.prob_right;
  return r;
}

bool crossing_blocked(double Px2_initial, double Py_initial, double phi_B,
                      const PhysicalParams& params) {
  const double qp = params.q * phi_B;
  return Px2_initial < qp * qp - 2.0 * qp * Py_initial;
}

double perturbative_energy_increase(std::span<const double> psi_y, int cut_index, double eps,
                                    const PhysicalParams& params, double a) {
  if (cut_index < 0 || cut_index >= static_cast<int>(psi_y.size()))
    throw std::out_of_range("perturbative_energy_increase: cut index out of range");
  if (!(a > 0.0)) throw std::invalid_argument("perturbative_energy_increase: a must be > 0");
  const double density = psi_y[cut_index] * psi_y[cut_index];
  return 0.5 * eps * eps * params.q * params.q / params.m * density / a;
}

}  // namespace flux
