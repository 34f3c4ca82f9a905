#include "flux/hamiltonian.hpp"

#include <cmath>
#include <vector>

namespace flux {

SparseOperator build_hamiltonian(const LatticeGrid& grid, const LinkPhaseField& links,
                                 const PhysicalParams& params,
                                 const std::optional<AbsorberSpec>& absorber) {
  if (links.grid().nx != grid.nx || links.grid().ny != grid.ny ||
      links.grid().a != grid.a)
    throw std::invalid_argument("build_hamiltonian: link field compiled on a different grid");
  if (absorber && grid.boundary_x != Boundary::AbsorbingLayer)
    throw std::invalid_argument("build_hamiltonian: absorber requires boundary_x = absorbing-layer");
  if (grid.boundary_x == Boundary::AbsorbingLayer && !absorber)
    throw std::invalid_argument("build_hamiltonian: absorbing-layer boundary needs an AbsorberSpec");

  SparseOperator op;
  op.grid = grid;
  op.params = params;
  op.links = links;
  const double t = params.hbar * params.hbar / (2.0 * params.m * grid.a * grid.a);
  op.hopping_t = t;

  Eigen::VectorXd cap = Eigen::VectorXd::Zero(grid.n_sites());
  if (absorber) {
    const int margin = std::max(2, static_cast<int>(std::lround(absorber->margin_frac * grid.nx)));
    const double amp = absorber->strength * absorber->e_ref;
    for (int i = 0; i < grid.nx; ++i) {
      double xi = 0.0;
      if (i < margin) xi = static_cast<double>(margin - i) / margin;
      else if (i >= grid.nx - margin) xi = static_cast<double>(i - (grid.nx - margin - 1)) / margin;
      if (xi == 0.0) continue;
      const double w = amp * std::pow(xi, absorber->power);
      for (int j = 0; j < grid.ny; ++j) cap[grid.idx(i, j)] = w;
    }
    op.hermitian = false;
    op.cap = cap;
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<size_t>(grid.n_sites()) * 5);
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      const int row = grid.idx(i, j);
      Complex diag(4.0 * t, -cap[row]);
      trip.emplace_back(row, row, diag);

      // Hops: the amplitude for moving along a link (<head|H|tail>) carries
      // e^{+i phase}, so a counterclockwise loop picks up q * flux / hbar.
      if (i + 1 < grid.nx || grid.periodic_x()) {
        const int ip = (i + 1) % grid.nx;
        const Complex h = -t * std::polar(1.0, -links.phase_x(i, j));
        trip.emplace_back(row, grid.idx(ip, j), h);
        trip.emplace_back(grid.idx(ip, j), row, std::conj(h));
      }
      if (j + 1 < grid.ny || grid.periodic_y()) {
        const int jp = (j + 1) % grid.ny;
        const Complex h = -t * std::polar(1.0, -links.phase_y(i, j));
        trip.emplace_back(row, grid.idx(i, jp), h);
        trip.emplace_back(grid.idx(i, jp), row, std::conj(h));
      }
    }
  }
  op.H.resize(grid.n_sites(), grid.n_sites());
  op.H.setFromTriplets(trip.begin(), trip.end());
  op.H.makeCompressed();
  return op;
}

double hermiticity_residual(const SparseOperator& op) {
  SparseMatrixC Hh = op.H;
  if (op.cap.size() > 0)
    for (int k = 0; k < Hh.rows(); ++k) Hh.coeffRef(k, k) += Complex(0.0, op.cap[k]);
  SparseMatrixC adj = SparseMatrixC(Hh.adjoint());
  SparseMatrixC diff = Hh - adj;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

bool is_real_operator(const SparseOperator& op, double tol) {
  for (int k = 0; k < op.H.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(op.H, k); it; ++it)
      if (std::abs(it.value().imag()) > tol) return false;
  return true;
}

}  // namespace flux
