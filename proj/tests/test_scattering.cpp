#include <doctest.h>

#include <numbers>

#include "flux/scattering.hpp"

using namespace flux;
namespace {
constexpr double kPi = std::numbers::pi;
const PhysicalParams kP;
}  // namespace

TEST_CASE("step oracle closed forms") {
  CHECK(step_transmission_oracle(1.0, 0.0, 0.0, kP) == doctest::Approx(1.0));
  // phi_B = pi, k_y = 0, k_x = 2 pi: V = pi^2/2, k' = pi sqrt(3),
  // T = 8 sqrt(3) / (2 + sqrt(3))^2.
  const double expected = 8.0 * std::sqrt(3.0) / std::pow(2.0 + std::sqrt(3.0), 2);
  CHECK(step_transmission_oracle(2 * kPi, 0.0, kPi, kP) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.9948).epsilon(1e-4));
  // Exactly at threshold the transmitted channel is evanescent.
  CHECK(step_transmission_oracle(2.0, 0.0, 2.0, kP) == 0.0);
  CHECK(step_transmission_oracle(1.0, 0.0, 2.0, kP) == 0.0);
}

TEST_CASE("step oracle with transverse momentum lowers the barrier") {
  // V = (q^2 phi^2 - 2 q phi hbar k_y) / 2m becomes negative for large k_y.
  const double T = step_transmission_oracle(1.0, 3.0, 2.0, kP);
  CHECK(T > 0.0);
  CHECK(T <= 1.0);
}

TEST_CASE("minimum deflection branches") {
  CHECK(minimum_deflection(kPi / 2, 1.0, kP) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(minimum_deflection(3 * kPi / 2, 1.0, kP) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(minimum_deflection(kPi, 1.0, kP) == doctest::Approx(kPi).epsilon(1e-12));
  // Periodicity: adding a fluxon changes nothing.
  CHECK(minimum_deflection(kPi / 3 + kP.fluxon(), 1.0, kP) ==
        doctest::Approx(minimum_deflection(kPi / 3, 1.0, kP)).epsilon(1e-12));
}

TEST_CASE("guaranteed reflection moment criterion") {
  CHECK(guaranteed_reflection_quantum(0.25, 0.25, 2.0, kP));
  CHECK_FALSE(guaranteed_reflection_quantum(4.0, 0.0, 2.0, kP));
  CHECK_FALSE(guaranteed_reflection_quantum(0.01, 0.01, 0.0, kP));
}

TEST_CASE("momentum transfer spectrum of a synthetic diffracted state") {
  // Hand-build a transmitted state occupying known kinematic orders and check
  // the analyzer reads them back. Lattice: L = 1, 8 periods, Phi_B = pi/2.
  const double L = 1.0, Phi = kPi / 2;
  LatticeGrid g(64, 128, 0.0625, Boundary::HardWall, Boundary::Periodic);
  LinkPhaseField links = compile_gauge(FluxLineLattice{Phi, L, g.plaq_center_x(8)}, g, kP);

  // Kinematic modes appear in the gauge frame as plane waves times the
  // transported phase.
  const double w0 = 0.6, w1 = 0.4;  // weights for orders n = 0 and n = 1
  QuantumState psi(g, kP);
  const double qphi = kP.q * Phi / L;
  for (int i = 0; i < g.nx; ++i) {
    if (g.x(i) <= 0.0) continue;  // transmitted region only
    double theta = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      const double k0 = -qphi;                    // n = 0: dp = -q phi_B
      const double k1 = 2 * kPi / L - qphi;       // n = 1
      const Complex smooth = std::sqrt(w0) * std::polar(1.0, k0 * g.y(j)) +
                             std::sqrt(w1) * std::polar(1.0, k1 * g.y(j));
      psi.at(i, j) = smooth * std::polar(1.0, theta);
      if (j < g.n_links_y()) theta += links.phase_y(i, j);
    }
  }
  psi.normalize();

  DiffractionOptions opts;
  opts.x_cut = 0.0;
  DiffractionSpectrum spec = momentum_transfer_spectrum(psi, links, L, 0.0, kP, opts);
  CHECK(spec.phi_B == doctest::Approx(Phi / L).epsilon(1e-9));
  CHECK(spec.worst_comb_offset_bins() < 1e-6);
  REQUIRE(spec.peaks.size() == 2);
  double got0 = 0, got1 = 0;
  for (const auto& p : spec.peaks) {
    if (p.order == 0) got0 = p.weight;
    if (p.order == 1) got1 = p.weight;
  }
  CHECK(got0 == doctest::Approx(w0).epsilon(1e-6));
  CHECK(got1 == doctest::Approx(w1).epsilon(1e-6));
}

TEST_CASE("zero flux: single elastic peak") {
  const double L = 1.0;
  LatticeGrid g(64, 64, 0.125, Boundary::HardWall, Boundary::Periodic);
  LinkPhaseField links(g);
  QuantumState psi(g, kP);
  for (int i = g.nx / 2; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) psi.at(i, j) = 1.0;
  psi.normalize();
  DiffractionOptions opts;
  opts.x_cut = 0.0;
  DiffractionSpectrum spec = momentum_transfer_spectrum(psi, links, L, 0.0, kP, opts);
  REQUIRE(spec.peaks.size() == 1);
  CHECK(spec.peaks[0].order == 0);
  CHECK(spec.peaks[0].dp_y == doctest::Approx(0.0));
  CHECK(spec.peaks[0].weight == doctest::Approx(spec.transmitted_weight).epsilon(1e-9));
}

TEST_CASE("analyzer rejects states that have not crossed") {
  LatticeGrid g(64, 64, 0.125, Boundary::HardWall, Boundary::Periodic);
  LinkPhaseField links(g);
  QuantumState psi(g, kP);
  for (int i = 0; i < g.nx / 4; ++i)
    for (int j = 0; j < g.ny; ++j) psi.at(i, j) = 1.0;
  psi.normalize();
  DiffractionOptions opts;
  opts.x_cut = 0.0;
  CHECK_THROWS_AS(momentum_transfer_spectrum(psi, links, 1.0, 0.0, kP, opts),
                  std::invalid_argument);
}
