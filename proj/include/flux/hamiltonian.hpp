#pragma once

#include <Eigen/SparseCore>
#include <optional>

#include "flux/gauge.hpp"
#include "flux/state.hpp"

namespace flux {

/// Complex absorbing layer on the x edges: a negative-imaginary on-site ramp
/// W(x) = strength * e_ref * xi^power over the outer margin_frac of columns.
struct AbsorberSpec {
  double margin_frac = 0.15;
  double strength = 2.0;
  double e_ref = 1.0;  ///< energy scale; match the incident kinetic energy
  int power = 2;
};

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Magnetic Schrodinger operator on the lattice: 5-point kinetic stencil with
/// hopping t = hbar^2 / (2 m a^2), hoppings dressed by the link phases.
struct SparseOperator {
  SparseMatrixC H;
  LatticeGrid grid;
  PhysicalParams params;
  LinkPhaseField links;
  double hopping_t = 0.0;
  bool hermitian = true;
  Eigen::VectorXd cap;  ///< absorber diagonal W >= 0 (empty when no absorber)

  int dimension() const { return static_cast<int>(H.rows()); }
};

SparseOperator build_hamiltonian(const LatticeGrid& grid, const LinkPhaseField& links,
                                 const PhysicalParams& params,
                                 const std::optional<AbsorberSpec>& absorber = std::nullopt);

/// Largest |H(r,c) - conj(H(c,r))| over stored entries (CAP excluded).
double hermiticity_residual(const SparseOperator& op);

/// True when every stored entry is purely real (within tol).
bool is_real_operator(const SparseOperator& op, double tol = 0.0);

}  // namespace flux
