#pragma once

#include <vector>

#include "flux/evolve.hpp"
#include "flux/hamiltonian.hpp"

namespace flux {

struct SpectrumResult {
  std::vector<double> eigenvalues;  ///< ascending
  std::vector<QuantumState> states;
  std::vector<double> residuals;  ///< ||H psi - E psi|| for unit-norm psi

  /// Probability of eigenstate `idx` inside `region`.
  double localization(int idx, const Rect& region) const {
    return states.at(idx).probability_in(region);
  }
};

struct EigensolveOptions {
  double residual_tol = 1e-8;
  int max_basis_per_round = 160;  ///< Lanczos vectors per deflation round
  int max_total_ops = 20000;      ///< budget of shifted solves
  uint64_t seed = 1234;
};

/// k smallest eigenpairs of a Hermitian operator (inverse-mode Lanczos with
/// full reorthogonalization and deflation between rounds, backed by a sparse
/// factorization).
SpectrumResult lowest_eigenpairs(const SparseOperator& op, int k,
                                 const EigensolveOptions& opts = {});

/// k eigenpairs closest to sigma (shift-invert mode). Results come back in
/// ascending eigenvalue order.
SpectrumResult eigenpairs_near(const SparseOperator& op, double sigma, int k,
                               const EigensolveOptions& opts = {});

/// Ground energy of a hard-wall rectangle with side lengths L_cav and D.
double box_ground_energy(double L_cav, double D, const PhysicalParams& params);

/// Minimum average energy needed to completely cross a wall of strength
/// phi_B inside a cavity of width L_cav.
double crossing_energy(double L_cav, double phi_B, const PhysicalParams& params);

/// Sufficient condition for bound states between two walls a distance D
/// apart: D > pi hbar / |q phi_B|. False for phi_B = 0.
bool bound_states_exist(double D, double phi_B, const PhysicalParams& params);

/// Harmonic ladder hbar w_c (n + 1/2), w_c = |q| B / m, n = 0..n_max.
std::vector<double> landau_reference(double B, const PhysicalParams& params, int n_max);

struct BoxDomain {
  double size_x = 0.0;  ///< hard-wall box extent
  double size_y = 0.0;
  double a = 0.0;       ///< lattice spacing
};

struct FluxGridSpectrum {
  SpectrumResult spectrum;
  LatticeGrid grid;
  SparseOperator op;  ///< kept for follow-up targeted solves
  double effective_B = 0.0;  ///< Phi_B / L^2
};

/// Low-lying spectrum of a square grid of flux lines (spacing L, flux Phi_B
/// per line, Phi_B < fluxon/2) filling a hard-wall box.
FluxGridSpectrum flux_grid_spectrum(double Phi_B, double L, const BoxDomain& domain,
                                    const PhysicalParams& params, int k,
                                    const EigensolveOptions& opts = {});

struct CavityConfig {
  double L_cav = 1.0;   ///< transverse cavity width
  double D = 2.0;       ///< separation of the two flux lines
  double Phi_B = 0.0;   ///< flux per line
  double length_x = 8.0;
  double a = 1.0 / 64.0;
  void validate() const;
};

struct CavitySystem {
  LatticeGrid grid;
  LinkPhaseField links;
  SparseOperator op;
  Rect inter_flux;  ///< open rectangle between the two lines
  double line_x = 0.0;  ///< actual (snapped) |x| of the lines
};

/// Long hard-wall cavity with two flux lines on its axis at +-D/2.
CavitySystem build_flux_line_cavity(const CavityConfig& cfg, const PhysicalParams& params);

struct BoundStateSearch {
  bool found = false;
  int index = -1;
  double energy = 0.0;
  double localization = 0.0;
  SpectrumResult spectrum;
};

/// Look for an eigenstate below `energy_ceiling` with at least
/// `localization_threshold` probability inside `region`.
BoundStateSearch find_bound_state(const CavitySystem& sys, int k, double energy_ceiling,
                                  double localization_threshold,
                                  const EigensolveOptions& opts = {});

struct LandauLevelOptions {
  int n_levels = 3;
  int k_per_level = 14;
  double bulk_margin_lengths = 2.5;  ///< inner-box margin in magnetic lengths
  double bulk_threshold = 0.5;       ///< minimum probability inside the inner box
  double window = 0.3;               ///< accept eigenvalues within window * hbar w_c of the level
};

struct LandauLevelReport {
  std::vector<double> reference;
  std::vector<double> estimate;
  std::vector<int> cluster_size;
  double max_rel_error = 0.0;
};

/// Estimate the lowest Landau levels of a flux-grid operator: targeted
/// shift-invert solves near each reference level, keep bulk-localized states
/// (edge states cling to the walls), average each cluster.
LandauLevelReport landau_levels_report(const SparseOperator& op, double B,
                                       const LandauLevelOptions& lopts = {},
                                       const EigensolveOptions& eopts = {});

}  // namespace flux
