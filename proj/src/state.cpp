#include "flux/state.hpp"

#include <cmath>
#include <numbers>

namespace flux {

void QuantumState::normalize() {
  const double n = std::sqrt(norm2());
  if (!(n > 0.0)) throw std::runtime_error("QuantumState::normalize: zero norm");
  psi_ /= n;
}

Complex QuantumState::overlap(const QuantumState& other) const {
  return psi_.dot(other.psi_) * cell_area();
}

double QuantumState::probability_right_of(double x_divider) const {
  double acc = 0.0;
  for (int i = 0; i < grid_.nx; ++i) {
    if (grid_.x(i) <= x_divider) continue;
    for (int j = 0; j < grid_.ny; ++j) acc += std::norm(psi_[grid_.idx(i, j)]);
  }
  return acc * cell_area();
}

double QuantumState::probability_in(const Rect& r) const {
  double acc = 0.0;
  for (int i = 0; i < grid_.nx; ++i) {
    const double x = grid_.x(i);
    if (x <= r.x0 || x >= r.x1) continue;
    for (int j = 0; j < grid_.ny; ++j) {
      const double y = grid_.y(j);
      if (y <= r.y0 || y >= r.y1) continue;
      acc += std::norm(psi_[grid_.idx(i, j)]);
    }
  }
  return acc * cell_area();
}

std::pair<double, double> QuantumState::mean_position() const {
  double n = 0.0, mx = 0.0, my = 0.0;
  for (int i = 0; i < grid_.nx; ++i)
    for (int j = 0; j < grid_.ny; ++j) {
      const double w = std::norm(psi_[grid_.idx(i, j)]);
      n += w;
      mx += w * grid_.x(i);
      my += w * grid_.y(j);
    }
  if (n == 0.0) return {0.0, 0.0};
  return {mx / n, my / n};
}

std::pair<double, double> QuantumState::widths() const {
  auto [mx, my] = mean_position();
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (int i = 0; i < grid_.nx; ++i)
    for (int j = 0; j < grid_.ny; ++j) {
      const double w = std::norm(psi_[grid_.idx(i, j)]);
      n += w;
      sx += w * (grid_.x(i) - mx) * (grid_.x(i) - mx);
      sy += w * (grid_.y(j) - my) * (grid_.y(j) - my);
    }
  if (n == 0.0) return {0.0, 0.0};
  return {std::sqrt(sx / n), std::sqrt(sy / n)};
}

QuantumState gaussian_packet(const GaussianPacketSpec& spec, const LatticeGrid& grid,
                             const PhysicalParams& params) {
  if (spec.sigma_x < 2.0 * grid.a)
    throw std::invalid_argument("gaussian_packet: sigma_x must be at least 2a");
  if (spec.x0 - 4.0 * spec.sigma_x < grid.x_lo() || spec.x0 + 4.0 * spec.sigma_x > grid.x_hi())
    throw std::invalid_argument("gaussian_packet: packet clipped by the x boundary");
  if (spec.sigma_y) {
    if (*spec.sigma_y < 2.0 * grid.a)
      throw std::invalid_argument("gaussian_packet: sigma_y must be at least 2a");
    if (!grid.periodic_y() &&
        (spec.y0 - 4.0 * *spec.sigma_y < grid.y_lo() || spec.y0 + 4.0 * *spec.sigma_y > grid.y_hi()))
      throw std::invalid_argument("gaussian_packet: packet clipped by the y boundary");
  }
  if (spec.transverse_ground && grid.periodic_y())
    throw std::invalid_argument("gaussian_packet: transverse ground mode needs hard walls in y");

  QuantumState state(grid, params);
  const double W = grid.width_y();
  for (int i = 0; i < grid.nx; ++i) {
    const double dx = grid.x(i) - spec.x0;
    const double gx = std::exp(-dx * dx / (4.0 * spec.sigma_x * spec.sigma_x));
    for (int j = 0; j < grid.ny; ++j) {
      const double yy = grid.y(j);
      double gy = 1.0;
      if (spec.transverse_ground) {
        // Exact discrete ground mode of the Dirichlet chain.
        gy = std::sin(std::numbers::pi * (j + 1) / (grid.ny + 1));
      } else if (spec.sigma_y) {
        const double dy = yy - spec.y0;
        gy = std::exp(-dy * dy / (4.0 * *spec.sigma_y * *spec.sigma_y));
      }
      const double phase = spec.kx * (grid.x(i)) + spec.ky * yy;
      state.at(i, j) = gx * gy * std::polar(1.0, phase);
    }
  }
  (void)W;
  state.normalize();
  return state;
}

}  // namespace flux
