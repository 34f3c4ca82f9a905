#pragma once

#include <span>

#include "flux/hamiltonian.hpp"

namespace flux {

/// Expectation values of one state. Canonical momenta are plain translation
/// generators (transverse spectral moments); kinematic momenta use
/// gauge-covariant differences and are the physical mass*velocity.
struct ObservableReport {
  double norm2 = 0.0;
  double energy = 0.0;       ///< <H> (Hermitian part for absorbing runs)
  double Px = 0.0, Px2 = 0.0;
  double Py = 0.0, Py2 = 0.0;
  double px_kin = 0.0, py_kin = 0.0;
  double prob_left = 0.0, prob_right = 0.0;
};

ObservableReport measure(const QuantumState& state, const SparseOperator& op, double divider_x);

/// Average-moment crossing criterion for a wall of strength phi_B: an
/// incident state cannot completely pass when
/// <Px^2> < q^2 phi_B^2 - 2 q phi_B <Py>.
bool crossing_blocked(double Px2_initial, double Py_initial, double phi_B,
                      const PhysicalParams& params);

/// Second-order energy increase of a transverse mode crossing a weak flux
/// line (flux eps), with the squared point interaction regularized on the
/// lattice as 1/a: (eps^2 q^2 / 2m) * (1/a) * |psi_y(cut)|^2.
double perturbative_energy_increase(std::span<const double> psi_y, int cut_index, double eps,
                                    const PhysicalParams& params, double a);

}  // namespace flux
