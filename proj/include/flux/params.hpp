#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flux {

/// Physical constants of a run. Natural units (hbar = q = m = 1) by default;
/// every value is overridable.
struct PhysicalParams {
  double hbar = 1.0;  ///< action quantum, > 0
  double q = 1.0;     ///< charge, != 0
  double m = 1.0;     ///< mass, > 0

  PhysicalParams() = default;
  PhysicalParams(double hbar_, double q_, double m_) : hbar(hbar_), q(q_), m(m_) {
    validate();
  }

  void validate() const {
    if (!(hbar > 0.0)) throw std::invalid_argument("PhysicalParams: hbar must be > 0");
    if (q == 0.0) throw std::invalid_argument("PhysicalParams: q must be nonzero");
    if (!(m > 0.0)) throw std::invalid_argument("PhysicalParams: m must be > 0");
  }

  /// Flux quantum 2*pi*hbar/q. Adding one to any flux line leaves quantum
  /// dynamics unchanged.
  double fluxon() const { return 2.0 * std::numbers::pi * hbar / q; }
};

/// Returns 2*pi*hbar/q.
inline double fluxon(const PhysicalParams& p) { return p.fluxon(); }

/// Reduce a flux to the fundamental interval [0, fluxon).
inline double reduce_flux(double phi, const PhysicalParams& p) {
  const double phi0 = std::abs(p.fluxon());
  double r = std::fmod(phi, phi0);
  if (r < 0.0) r += phi0;
  if (r >= phi0) r = 0.0;  // guard against rounding at the boundary
  return r;
}

}  // namespace flux
