#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <functional>

#include "flux/hamiltonian.hpp"

namespace flux {

/// Raised when an iterative or direct linear solve fails to converge.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvolveOptions {
  double dt = 1e-3;
  int steps = 1;
  double solver_tol = 1e-12;
  int solver_max_iters = 2000;
  /// Observer cadence; 0 disables sampling. The observer also fires at the
  /// final step.
  int sample_every = 0;
  std::function<void(int step, double t, const QuantumState&)> observer;
  /// Absorbed probability is attributed to the side of this divider.
  double absorb_divider_x = 0.0;
};

struct EvolveResult {
  QuantumState state;
  double absorbed_left = 0.0;   ///< probability soaked up left of the divider
  double absorbed_right = 0.0;  ///< and right of it
  long solver_iterations = 0;
};

/// Cayley / trapezoidal stepping: (1 + i dt H / 2hbar) psi' = (1 - i dt H / 2hbar) psi.
/// Unconditionally stable; exactly unitary for Hermitian H up to the linear
/// solve tolerance.
class CrankNicolson {
 public:
  CrankNicolson(const SparseOperator& op, double dt, double solver_tol = 1e-12,
                int solver_max_iters = 2000);

  void step(QuantumState& state);
  long last_iterations() const { return last_iterations_; }

 private:
  const SparseOperator& op_;
  SparseMatrixC lhs_, rhs_;
  Eigen::BiCGSTAB<SparseMatrixC> solver_;
  long last_iterations_ = 0;
};

EvolveResult evolve(const QuantumState& initial, const SparseOperator& op,
                    const EvolveOptions& opts);

/// Convenience wrapper returning only the final state.
QuantumState evolve(const QuantumState& initial, const SparseOperator& op, double dt, int nsteps);

}  // namespace flux
