#pragma once

#include <vector>

#include "flux/hamiltonian.hpp"

namespace flux {

struct DiffractionPeak {
  int order = 0;       ///< comb order n
  double dp_y = 0.0;   ///< measured kinematic momentum transfer
  double weight = 0.0; ///< probability carried by the peak
};

/// Transverse momentum-transfer spectrum of a transmitted packet. Peaks sit
/// on the comb dp_y = 2 pi hbar n / L - q phi_B; the weight that is missing
/// from the sum was reflected or absorbed.
struct DiffractionSpectrum {
  std::vector<DiffractionPeak> peaks;
  double bin_width = 0.0;          ///< momentum resolution 2 pi hbar / (ny a)
  double transmitted_weight = 0.0; ///< probability right of the cut
  double phi_B = 0.0;              ///< flux per unit length Phi_B / L
  double L = 0.0;                  ///< lattice spacing
  double hbar = 1.0;
  double q = 1.0;

  double comb_position(int order) const;  ///< 2 pi hbar n / L - q phi_B
  /// Largest |measured - comb| over peaks, in bins.
  double worst_comb_offset_bins() const;
};

struct DiffractionOptions {
  double x_cut = 0.0;                   ///< analyze the region x > x_cut
  double min_transmitted = 0.05;        ///< error below this probability
  double noise_floor = 1e-3;            ///< peak detection threshold per bin
};

/// Decompose the transmitted part of `state` into transverse kinematic
/// momentum modes (the link phases are transported away first, so the
/// spectrum is gauge-invariant) and map each detected peak to its comb order.
/// Requires periodic y spanning a whole number of lattice periods L.
DiffractionSpectrum momentum_transfer_spectrum(const QuantumState& state,
                                               const LinkPhaseField& links, double L,
                                               double ky_incident, const PhysicalParams& params,
                                               const DiffractionOptions& opts);

/// Smallest possible |dp_y| for a lattice of flux lines with spacing L:
/// q Phi_B / L below half a fluxon, 2 pi hbar / L - q Phi_B / L above.
double minimum_deflection(double Phi_B, double L, const PhysicalParams& params);

/// Plane-wave transmission through the equivalent 1D momentum step: the wall
/// shifts the transverse channel by q phi_B, leaving an effective step
/// V = (q^2 phi_B^2 - 2 q phi_B hbar k_y) / 2m for the x motion.
double step_transmission_oracle(double kx, double ky, double phi_B,
                                const PhysicalParams& params);

/// Moment form of the guaranteed-reflection condition:
/// sqrt(<Px^2> + <Py^2>) < |q phi_B| / 2.
bool guaranteed_reflection_quantum(double Px2, double Py2, double phi_B,
                                   const PhysicalParams& params);

}  // namespace flux
