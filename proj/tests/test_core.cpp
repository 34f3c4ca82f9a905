#include <doctest.h>

#include <numbers>
#include <random>

#include "flux/gauge.hpp"

using namespace flux;
namespace {
constexpr double kPi = std::numbers::pi;

LatticeGrid small_grid(Boundary by = Boundary::HardWall) {
  return LatticeGrid(12, 12, 0.5, Boundary::HardWall, by);
}
}  // namespace

TEST_CASE("fluxon value") {
  CHECK(fluxon(PhysicalParams(1, 1, 1)) == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(fluxon(PhysicalParams(1, 2, 1)) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(fluxon(PhysicalParams(1, 0.5, 1)) == doctest::Approx(4 * kPi).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PhysicalParams(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhysicalParams(1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhysicalParams(1, 1, -1), std::invalid_argument);
}

TEST_CASE("reduce_flux maps into [0, fluxon)") {
  PhysicalParams p;
  CHECK(reduce_flux(7.0, p) == doctest::Approx(7.0 - 2 * kPi).epsilon(1e-12));
  CHECK(reduce_flux(-1.0, p) == doctest::Approx(2 * kPi - 1.0).epsilon(1e-12));
  CHECK(reduce_flux(2 * kPi, p) == doctest::Approx(0.0));
  for (double phi : {-100.0, -3.2, 0.0, 12.9, 400.0}) {
    const double r = reduce_flux(phi, p);
    CHECK(r >= 0.0);
    CHECK(r < 2 * kPi);
  }
}

TEST_CASE("flux line compiles to a single nonzero plaquette") {
  PhysicalParams p;
  LatticeGrid g = small_grid();
  const double x = g.plaq_center_x(5), y = g.plaq_center_y(5);
  LinkPhaseField f = compile_gauge(FluxLine{kPi, x, y}, g, p);
  for (int i = 0; i < g.n_plaq_x(); ++i)
    for (int j = 0; j < g.n_plaq_y(); ++j) {
      const double expect = (i == 5 && j == 5) ? kPi : 0.0;
      CHECK(plaquette_flux(f, i, j, p) == doctest::Approx(expect).epsilon(1e-12));
    }
  // Branch cut along +x: vertical links to the right of the line in its row.
  for (int i = 0; i < g.nx; ++i)
    CHECK(f.phase_y(i, 5) == doctest::Approx(i > 5 ? kPi : 0.0));
}

TEST_CASE("flux line must sit at a plaquette center") {
  PhysicalParams p;
  LatticeGrid g = small_grid();
  CHECK_THROWS_AS(compile_gauge(FluxLine{1.0, g.x(4), g.y(4)}, g, p), std::invalid_argument);
  CHECK_THROWS_AS(compile_gauge(FluxLine{1.0, 100.0, 0.0}, g, p), std::invalid_argument);
}

TEST_CASE("widthless wall: vertical links right of the wall carry q phi_B a") {
  PhysicalParams p(1.0, 2.0, 1.0);
  LatticeGrid g = small_grid();
  const double x0 = 0.1;  // inside a plaquette column
  const double phi_B = 0.7;
  LinkPhaseField f = compile_gauge(UniformWall{phi_B, x0, 0.0}, g, p);
  const int col = static_cast<int>(std::floor((x0 - g.x_min) / g.a));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.n_links_y(); ++j) {
      const double expect = g.x(i) > x0 ? p.q * phi_B * g.a / p.hbar : 0.0;
      CHECK(f.phase_y(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  for (int i = 0; i < g.n_plaq_x(); ++i) {
    const double expect = (i == col) ? phi_B * g.a : 0.0;
    CHECK(plaquette_flux(f, i, 3, p) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("zero-flux spec compiles to all-zero phases") {
  PhysicalParams p;
  LatticeGrid g = small_grid();
  CHECK(compile_gauge(UniformField{0.0, std::nullopt}, g, p).all_zero());
  CHECK(compile_gauge(FluxLine{0.0, g.plaq_center_x(3), g.plaq_center_y(3)}, g, p).all_zero());
}

TEST_CASE("uniform field fills every plaquette with B a^2") {
  PhysicalParams p;
  LatticeGrid g = small_grid();
  const double B = 0.8;
  LinkPhaseField f = compile_gauge(UniformField{B, std::nullopt}, g, p);
  for (int i = 0; i < g.n_plaq_x(); ++i)
    for (int j = 0; j < g.n_plaq_y(); ++j)
      CHECK(plaquette_flux(f, i, j, p) == doctest::Approx(B * g.a * g.a).epsilon(1e-12));
}

TEST_CASE("plaquette_flux bounds checking") {
  PhysicalParams p;
  LatticeGrid g = small_grid();
  LinkPhaseField f = compile_gauge(UniformField{0.1, std::nullopt}, g, p);
  CHECK_THROWS_AS(plaquette_flux(f, -1, 0, p), std::out_of_range);
  CHECK_THROWS_AS(plaquette_flux(f, 0, g.n_plaq_y(), p), std::out_of_range);
}

TEST_CASE("site regauge leaves plaquette fluxes unchanged") {
  PhysicalParams p;
  LatticeGrid g = small_grid(Boundary::Periodic);
  const double x = g.plaq_center_x(4), y = g.plaq_center_y(7);
  LinkPhaseField f = compile_gauge(FluxLine{1.0, x, y}, g, p);
  LinkPhaseField f2 = f;

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-kPi, kPi);
  std::vector<double> chi(g.n_sites());
  for (auto& c : chi) c = dist(rng);
  apply_site_regauge(f2, chi);

  for (int i = 0; i < g.n_plaq_x(); ++i)
    for (int j = 0; j < g.n_plaq_y(); ++j) {
      // Equality mod the fluxon: reduction can land an exact zero on either
      // side of the interval boundary.
      const double d = std::remainder(
          plaquette_flux(f2, i, j, p) - plaquette_flux(f, i, j, p), p.fluxon());
      CHECK(std::abs(d) < 1e-9);
    }
}

TEST_CASE("fluxon periodicity: adding a fluxon shifts link phases by 2 pi") {
  PhysicalParams p;
  LatticeGrid g = small_grid();
  const double x = g.plaq_center_x(5), y = g.plaq_center_y(5);
  LinkPhaseField f1 = compile_gauge(FluxLine{1.3, x, y}, g, p);
  LinkPhaseField f2 = compile_gauge(FluxLine{1.3 + p.fluxon(), x, y}, g, p);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.n_links_y(); ++j) {
      const double d = std::remainder(f2.phase_y(i, j) - f1.phase_y(i, j), 2 * kPi);
      CHECK(std::abs(d) < 1e-12);
    }
}

TEST_CASE("flux-line lattice spacing constraints") {
  PhysicalParams p;
  LatticeGrid g(16, 16, 0.25, Boundary::HardWall, Boundary::Periodic);
  // Spacing not a multiple of a
  CHECK_THROWS_AS(compile_gauge(FluxLineLattice{1.0, 0.6, g.plaq_center_x(7)}, g, p),
                  std::invalid_argument);
  // Period does not divide the transverse span (16 % 5 != 0 links)
  CHECK_THROWS_AS(compile_gauge(FluxLineLattice{1.0, 1.25, g.plaq_center_x(7)}, g, p),
                  std::invalid_argument);
  // Valid: 4 periods of 4 links
  LinkPhaseField f = compile_gauge(FluxLineLattice{0.9, 1.0, g.plaq_center_x(7)}, g, p);
  int hits = 0;
  for (int j = 0; j < g.n_plaq_y(); ++j)
    if (plaquette_flux(f, 7, j, p) > 1e-12) ++hits;
  CHECK(hits == 4);
}

TEST_CASE("flux-grid below half a fluxon only") {
  PhysicalParams p;
  LatticeGrid g(16, 16, 0.25, Boundary::HardWall, Boundary::HardWall);
  CHECK_THROWS_AS(compile_gauge(FluxGrid{kPi, 1.0, 0.0, 0.0}, g, p), std::invalid_argument);
  LinkPhaseField f = compile_gauge(FluxGrid{0.5, 1.0, 0.0, 0.0}, g, p);
  double total = 0.0;
  for (int i = 0; i < g.n_plaq_x(); ++i)
    for (int j = 0; j < g.n_plaq_y(); ++j) total += plaquette_flux(f, i, j, p);
  // 15x15 plaquettes hold a 4x4 or 3x4 arrangement of lines depending on the
  // origin alignment; every line carries exactly 0.5.
  CHECK(std::abs(total / 0.5 - std::round(total / 0.5)) < 1e-9);
  CHECK(total > 0.0);
}

TEST_CASE("periodic x rejects nonzero flux") {
  PhysicalParams p;
  LatticeGrid g(12, 12, 0.5, Boundary::Periodic, Boundary::HardWall);
  CHECK_THROWS_AS(compile_gauge(UniformField{1.0, std::nullopt}, g, p), std::invalid_argument);
  CHECK(compile_gauge(UniformField{0.0, std::nullopt}, g, p).all_zero());
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(LatticeGrid(4, 12, 0.5, Boundary::HardWall, Boundary::HardWall),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticeGrid(12, 12, -0.5, Boundary::HardWall, Boundary::HardWall),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticeGrid(12, 12, 0.5, Boundary::HardWall, Boundary::AbsorbingLayer),
                  std::invalid_argument);
}
