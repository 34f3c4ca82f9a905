#include "flux/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace flux {
namespace {

using ColMajorC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

/// Shifted solve y = (H - sigma)^-1 x behind one interface. The LDLT path
/// covers sigma at or below the spectrum; LU covers interior shifts.
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseOperator& op, double sigma) {
    ColMajorC K = ColMajorC(op.H);
    if (sigma != 0.0) {
      ColMajorC id(K.rows(), K.cols());
      id.setIdentity();
      K = K - sigma * id;
    }
    K.makeCompressed();
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<ColMajorC>>();
    ldlt_->compute(K);
    if (ldlt_->info() == Eigen::Success && diagonal_sane()) return;
    ldlt_.reset();
    lu_ = std::make_unique<Eigen::SparseLU<ColMajorC>>();
    lu_->compute(K);
    if (lu_->info() != Eigen::Success)
      throw SolverError("eigensolver: shifted factorization failed");
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& x) const {
    if (ldlt_) return Eigen::VectorXcd(ldlt_->solve(x));
    return Eigen::VectorXcd(lu_->solve(x));
  }

 private:
  bool diagonal_sane() const {
    // LDLT without pivoting can go astray on indefinite matrices; reject
    // factorizations with non-finite or zero pivots.
    const auto& d = ldlt_->vectorD();
    for (int i = 0; i < d.size(); ++i) {
      const double mag = std::abs(d[i]);
      if (!std::isfinite(mag) || mag == 0.0) return false;
    }
    return true;
  }

  std::unique_ptr<Eigen::SimplicialLDLT<ColMajorC>> ldlt_;
  std::unique_ptr<Eigen::SparseLU<ColMajorC>> lu_;
};

struct RitzPair {
  double lambda = 0.0;
  Eigen::VectorXcd vec;
  double residual = 0.0;
};

/// One Lanczos round on OP = (H - sigma)^-1 with full reorthogonalization,
/// deflated against previously converged vectors. Returns the Ritz pairs
/// (in H eigenvalue terms) whose explicit H-residual meets tol.
std::vector<RitzPair> lanczos_round(const SparseOperator& op, const ShiftedSolver& solver,
                                    double sigma, int want, double tol, int max_basis,
                                    const std::vector<Eigen::VectorXcd>& deflate,
                                    std::mt19937_64& rng, int* ops_used) {
  const int n = op.dimension();
  std::vector<Eigen::VectorXcd> V;
  std::vector<double> alpha, beta;

  auto orthogonalize = [&](Eigen::VectorXcd& w) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& d : deflate) w -= d.dot(w) * d;
      for (const auto& v : V) w -= v.dot(w) * v;
    }
  };

  auto random_start = [&]() {
    std::normal_distribution<double> dist;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(dist(rng), dist(rng));
    orthogonalize(v);
    const double nm = v.norm();
    if (nm < 1e-12) throw SolverError("eigensolver: cannot find a fresh start vector");
    return Eigen::VectorXcd(v / nm);
  };

  V.push_back(random_start());
  std::vector<RitzPair> accepted;

  while (static_cast<int>(V.size()) <= max_basis) {
    const int j = static_cast<int>(V.size()) - 1;
    Eigen::VectorXcd w = solver.solve(V[j]);
    ++*ops_used;
    const double a = V[j].dot(w).real();
    alpha.push_back(a);
    w -= a * V[j];
    if (j > 0) w -= beta[j - 1] * V[j - 1];
    orthogonalize(w);
    const double b = w.norm();

    const bool basis_full = static_cast<int>(V.size()) == max_basis;
    const bool breakdown = b < 1e-12;
    const bool check = basis_full || breakdown || (j >= 10 && j % 10 == 0);
    if (check && !alpha.empty()) {
      const int m = static_cast<int>(alpha.size());
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (int r = 0; r < m; ++r) {
        T(r, r) = alpha[r];
        if (r + 1 < m) T(r, r + 1) = T(r + 1, r) = beta[r];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

      // Largest |mu| of the inverse operator = eigenvalues of H nearest sigma.
      std::vector<int> order(m);
      for (int i = 0; i < m; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int l, int r) {
        return std::abs(es.eigenvalues()[l]) > std::abs(es.eigenvalues()[r]);
      });

      accepted.clear();
      for (int rank = 0; rank < std::min(want, m); ++rank) {
        const int col = order[rank];
        const double mu = es.eigenvalues()[col];
        if (std::abs(mu) < 1e-300) continue;
        // Cheap Kaniel-Paige filter first, then the explicit residual.
        const double beta_last = (m - 1 < static_cast<int>(beta.size())) ? beta[m - 1] : b;
        if (std::abs(beta_last * es.eigenvectors()(m - 1, col)) > 1e-2 * std::abs(mu)) continue;
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
        for (int r = 0; r < m; ++r) x += es.eigenvectors()(r, col) * V[r];
        x.normalize();
        const double lambda = sigma + 1.0 / mu;
        const double res = (op.H * x - lambda * x).norm();
        if (res <= tol) {
          RitzPair p;
          p.lambda = lambda;
          p.vec = std::move(x);
          p.residual = res;
          accepted.push_back(std::move(p));
        }
      }
      if (static_cast<int>(accepted.size()) >= want || basis_full || breakdown) break;
    }
    if (breakdown) break;
    beta.push_back(b);
    V.push_back(w / b);
  }
  return accepted;
}

SpectrumResult solve_near(const SparseOperator& op, double sigma, int k,
                          const EigensolveOptions& opts, bool lowest_mode) {
  if (!op.hermitian) throw std::invalid_argument("eigensolver: operator must be Hermitian");
  if (k < 1 || k >= op.dimension())
    throw std::invalid_argument("eigensolver: k out of range");

  ShiftedSolver solver(op, sigma);
  std::mt19937_64 rng(opts.seed);
  std::vector<Eigen::VectorXcd> vectors;
  std::vector<double> values, residuals;
  int ops_used = 0;
  int stale_rounds = 0;

  while (static_cast<int>(vectors.size()) < k) {
    if (ops_used > opts.max_total_ops)
      throw SolverError("eigensolver: iteration budget exhausted");
    const int missing = k - static_cast<int>(vectors.size());
    const int basis = std::min(opts.max_basis_per_round, std::max(40, 2 * missing + 30));
    auto found = lanczos_round(op, solver, sigma, missing, opts.residual_tol, basis, vectors,
                               rng, &ops_used);
    // Deflate everything new; orthogonality against older vectors is enforced
    // inside the round.
    int added = 0;
    for (auto& p : found) {
      Eigen::VectorXcd v = p.vec;
      for (const auto& d : vectors) v -= d.dot(v) * d;
      const double nm = v.norm();
      if (nm < 0.5) continue;  // duplicate of an already-converged vector
      v /= nm;
      vectors.push_back(std::move(v));
      values.push_back(p.lambda);
      residuals.push_back(p.residual);
      ++added;
    }
    if (added == 0) {
      if (++stale_rounds >= 4)
        throw SolverError("eigensolver: no progress towards the requested pairs");
    } else {
      stale_rounds = 0;
    }
  }

  // In lowest mode a later round may have converged a value below an earlier
  // one; sort everything ascending before returning.
  std::vector<int> order(values.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int l, int r) { return values[l] < values[r]; });
  (void)lowest_mode;

  SpectrumResult out;
  const double a = op.grid.a;
  for (int idx : order) {
    out.eigenvalues.push_back(values[idx]);
    out.residuals.push_back(residuals[idx]);
    QuantumState st(op.grid, op.params);
    st.amplitudes() = vectors[idx] / a;  // unit norm under the a^2 measure
    // Fix the arbitrary global phase for reproducible dumps.
    int imax = 0;
    vectors[idx].cwiseAbs().maxCoeff(&imax);
    const Complex ph = vectors[idx][imax] / std::abs(vectors[idx][imax]);
    st.amplitudes() /= ph;
    out.states.push_back(std::move(st));
  }
  return out;
}

}  // namespace

SpectrumResult lowest_eigenpairs(const SparseOperator& op, int k, const EigensolveOptions& opts) {
  return solve_near(op, 0.0, k, opts, true);
}

SpectrumResult eigenpairs_near(const SparseOperator& op, double sigma, int k,
                               const EigensolveOptions& opts) {
  return solve_near(op, sigma, k, opts, false);
}

double box_ground_energy(double L_cav, double D, const PhysicalParams& params) {
  if (!(L_cav > 0.0) || !(D > 0.0))
    throw std::invalid_argument("box_ground_energy: sides must be positive");
  const double pref = std::numbers::pi * std::numbers::pi * params.hbar * params.hbar /
                      (2.0 * params.m);
  return pref / (L_cav * L_cav) + pref / (D * D);
}

double crossing_energy(double L_cav, double phi_B, const PhysicalParams& params) {
  if (!(L_cav > 0.0)) throw std::invalid_argument("crossing_energy: L_cav must be positive");
  const double pref = std::numbers::pi * std::numbers::pi * params.hbar * params.hbar /
                      (2.0 * params.m);
  return pref / (L_cav * L_cav) + params.q * params.q * phi_B * phi_B / (2.0 * params.m);
}

bool bound_states_exist(double D, double phi_B, const PhysicalParams& params) {
  if (phi_B == 0.0) return false;
  return D > std::numbers::pi * params.hbar / std::abs(params.q * phi_B);
}

std::vector<double> landau_reference(double B, const PhysicalParams& params, int n_max) {
  if (B == 0.0) throw std::invalid_argument("landau_reference: B must be nonzero");
  const double wc = std::abs(params.q) * std::abs(B) / params.m;
  std::vector<double> out;
  for (int n = 0; n <= n_max; ++n) out.push_back(params.hbar * wc * (n + 0.5));
  return out;
}

FluxGridSpectrum flux_grid_spectrum(double Phi_B, double L, const BoxDomain& domain,
                                    const PhysicalParams& params, int k,
                                    const EigensolveOptions& opts) {
  if (!(L > 0.0)) throw std::invalid_argument("flux_grid_spectrum: spacing must be positive");
  // Work with the periodicity-equivalent flux in (-fluxon/2, fluxon/2]; only
  // an exact half fluxon has no equivalent below the grid constraint.
  const double phi0 = std::abs(params.fluxon());
  double phi_eq = reduce_flux(Phi_B, params);
  if (phi_eq > 0.5 * phi0) phi_eq -= phi0;
  if (std::abs(phi_eq) >= 0.5 * phi0)
    throw std::invalid_argument("flux_grid_spectrum: flux is half a fluxon per line");
  const int nx = static_cast<int>(std::lround(domain.size_x / domain.a)) - 1;
  const int ny = static_cast<int>(std::lround(domain.size_y / domain.a)) - 1;
  LatticeGrid grid(nx, ny, domain.a, Boundary::HardWall, Boundary::HardWall);
  GaugeSpec spec = FluxGrid{phi_eq, L, 0.0, 0.0};
  LinkPhaseField links = compile_gauge(spec, grid, params);

  FluxGridSpectrum out;
  out.op = build_hamiltonian(grid, links, params);
  out.spectrum = lowest_eigenpairs(out.op, k, opts);
  out.grid = grid;
  out.effective_B = Phi_B / (L * L);
  return out;
}

void CavityConfig::validate() const {
  if (!(L_cav > 0.0) || !(D > 0.0) || !(length_x > 0.0) || !(a > 0.0))
    throw std::invalid_argument("CavityConfig: geometry must be positive");
  if (D >= length_x)
    throw std::invalid_argument("CavityConfig: flux lines must sit inside the cavity");
}

CavitySystem build_flux_line_cavity(const CavityConfig& cfg, const PhysicalParams& params) {
  cfg.validate();
  const int nx = static_cast<int>(std::lround(cfg.length_x / cfg.a)) - 1;
  const int ny = static_cast<int>(std::lround(cfg.L_cav / cfg.a)) - 1;
  LatticeGrid grid(nx, ny, cfg.a, Boundary::HardWall, Boundary::HardWall);

  // Snap the line positions to plaquette centers nearest +-D/2 on the axis.
  auto snap = [&](double x) {
    const int i = static_cast<int>(std::lround((x - grid.x_min) / grid.a - 0.5));
    return grid.plaq_center_x(i);
  };
  auto snap_y = [&](double y) {
    const int j = static_cast<int>(std::lround((y - grid.y_min) / grid.a - 0.5));
    return grid.plaq_center_y(j);
  };
  const double y_axis = snap_y(0.0);
  const double xr = snap(0.5 * cfg.D);
  const double xl = snap(-0.5 * cfg.D);

  std::vector<GaugeSpec> specs{FluxLine{cfg.Phi_B, xl, y_axis}, FluxLine{cfg.Phi_B, xr, y_axis}};
  CavitySystem sys{grid, compile_gauge(std::span<const GaugeSpec>(specs), grid, params),
                   SparseOperator{}, Rect{}, xr};
  sys.op = build_hamiltonian(grid, sys.links, params);
  sys.inter_flux = Rect{xl, xr, grid.y_lo(), grid.y_hi()};
  return sys;
}

BoundStateSearch find_bound_state(const CavitySystem& sys, int k, double energy_ceiling,
                                  double localization_threshold, const EigensolveOptions& opts) {
  BoundStateSearch search;
  search.spectrum = lowest_eigenpairs(sys.op, k, opts);
  for (size_t i = 0; i < search.spectrum.eigenvalues.size(); ++i) {
    if (search.spectrum.eigenvalues[i] >= energy_ceiling) continue;
    const double loc = search.spectrum.localization(static_cast<int>(i), sys.inter_flux);
    if (loc >= localization_threshold && (!search.found || loc > search.localization)) {
      search.found = true;
      search.index = static_cast<int>(i);
      search.energy = search.spectrum.eigenvalues[i];
      search.localization = loc;
    }
  }
  return search;
}

LandauLevelReport landau_levels_report(const SparseOperator& op, double B,
                                       const LandauLevelOptions& lopts,
                                       const EigensolveOptions& eopts) {
  const PhysicalParams& p = op.params;
  LandauLevelReport rep;
  rep.reference = landau_reference(B, p, lopts.n_levels - 1);
  const double wc = std::abs(p.q * B) / p.m;
  const double ell = std::sqrt(p.hbar / std::abs(p.q * B));
  const LatticeGrid& g = op.grid;
  const double margin = lopts.bulk_margin_lengths * ell;
  const Rect inner{g.x_lo() + margin, g.x_hi() - margin, g.y_lo() + margin, g.y_hi() - margin};

  rep.max_rel_error = 0.0;
  for (int n = 0; n < lopts.n_levels; ++n) {
    const double target = rep.reference[n];
    // Nudge the shift off the level so a near-exact eigenvalue cannot make
    // the shifted factorization numerically singular.
    const double sigma = target + 1.37e-2 * p.hbar * wc;
    SpectrumResult res = eigenpairs_near(op, sigma, lopts.k_per_level, eopts);
    double sum = 0.0;
    int count = 0;
    for (size_t i = 0; i < res.eigenvalues.size(); ++i) {
      if (std::abs(res.eigenvalues[i] - target) > lopts.window * p.hbar * wc) continue;
      if (res.localization(static_cast<int>(i), inner) < lopts.bulk_threshold) continue;
      sum += res.eigenvalues[i];
      ++count;
    }
    rep.cluster_size.push_back(count);
    const double est = count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
    rep.estimate.push_back(est);
    const double err = count > 0 ? std::abs(est - target) / target
                                 : std::numeric_limits<double>::infinity();
    rep.max_rel_error = std::max(rep.max_rel_error, err);
  }
  return rep;
}

}  // namespace flux
