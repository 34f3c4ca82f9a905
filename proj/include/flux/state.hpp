#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "flux/gauge.hpp"
#include "flux/grid.hpp"
#include "flux/params.hpp"

namespace flux {

using Complex = std::complex<double>;

/// Complex amplitude field on a lattice. The inner product carries the cell
/// area, so norm2() = sum |psi|^2 * a^2.
class QuantumState {
 public:
  QuantumState() = default;
  QuantumState(const LatticeGrid& grid, const PhysicalParams& params)
      : grid_(grid), params_(params), psi_(Eigen::VectorXcd::Zero(grid.n_sites())) {}

  const LatticeGrid& grid() const { return grid_; }
  const PhysicalParams& params() const { return params_; }
  Eigen::VectorXcd& amplitudes() { return psi_; }
  const Eigen::VectorXcd& amplitudes() const { return psi_; }

  Complex& at(int i, int j) { return psi_[grid_.idx(i, j)]; }
  Complex at(int i, int j) const { return psi_[grid_.idx(i, j)]; }

  double cell_area() const { return grid_.a * grid_.a; }
  double norm2() const { return psi_.squaredNorm() * cell_area(); }
  void normalize();

  Complex overlap(const QuantumState& other) const;

  /// Probability in x > x_divider (site-center partition).
  double probability_right_of(double x_divider) const;
  /// Probability inside an open rectangle.
  double probability_in(const Rect& r) const;

  /// rms widths of |psi|^2 about its mean position.
  std::pair<double, double> widths() const;
  std::pair<double, double> mean_position() const;

 private:
  LatticeGrid grid_;
  PhysicalParams params_;
  Eigen::VectorXcd psi_;
};

struct GaussianPacketSpec {
  double x0 = 0.0, y0 = 0.0;
  double kx = 0.0, ky = 0.0;
  double sigma_x = 1.0;
  std::optional<double> sigma_y = 1.0;  ///< absent: uniform along y (periodic runs)
  bool transverse_ground = false;       ///< multiply by the hard-wall ground mode in y
};

/// Normalized Gaussian wave packet with mean momentum hbar*k. Throws when the
/// packet would be clipped by the domain (4 sigma margin) or underresolved
/// (sigma < 2a).
QuantumState gaussian_packet(const GaussianPacketSpec& spec, const LatticeGrid& grid,
                             const PhysicalParams& params);

}  // namespace flux
