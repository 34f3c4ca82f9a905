#include "flux/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "flux/classical.hpp"
#include "flux/emergence.hpp"
#include "flux/evolve.hpp"
#include "flux/observables.hpp"
#include "flux/scattering.hpp"
#include "flux/spectral.hpp"

namespace flux::harness {
namespace fs = std::filesystem;
namespace {

// ---------------------------------------------------------------------------
// config access helpers
// ---------------------------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config error at " + path + ": " + msg);
}

const Json& need(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "/" + key, "missing required field");
  return j.at(key);
}

double need_num(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number()) fail(path + "/" + key, "expected a number");
  return v.get<double>();
}

double opt_num(const Json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number()) fail(key, "expected a number");
  return j.at(key).get<double>();
}

int opt_int(const Json& j, const std::string& key, int fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number_integer()) fail(key, "expected an integer");
  return j.at(key).get<int>();
}

bool opt_bool(const Json& j, const std::string& key, bool fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(key, "expected a boolean");
  return j.at(key).get<bool>();
}

std::string opt_str(const Json& j, const std::string& key, const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(key, "expected a string");
  return j.at(key).get<std::string>();
}

PhysicalParams parse_params(const Json& cfg) {
  PhysicalParams p;
  if (cfg.contains("params")) {
    const Json& j = cfg.at("params");
    p.hbar = opt_num(j, "hbar", 1.0);
    p.q = opt_num(j, "q", 1.0);
    p.m = opt_num(j, "m", 1.0);
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    fail("/params", e.what());
  }
  return p;
}

LatticeGrid parse_grid(const Json& cfg) {
  const Json& j = need(cfg, "grid", "");
  const int nx = static_cast<int>(need_num(j, "nx", "/grid"));
  const int ny = static_cast<int>(need_num(j, "ny", "/grid"));
  const double a = need_num(j, "a", "/grid");
  Boundary bx = Boundary::HardWall, by = Boundary::HardWall;
  try {
    bx = boundary_from_string(opt_str(j, "boundary_x", "hard-wall"));
    by = boundary_from_string(opt_str(j, "boundary_y", "hard-wall"));
    LatticeGrid g(nx, ny, a, bx, by);
    g.x_min = opt_num(j, "x_min", g.x_min);
    g.y_min = opt_num(j, "y_min", g.y_min);
    return g;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail("/grid", e.what());
  }
}

GaussianPacketSpec parse_packet(const Json& cfg) {
  const Json& j = need(cfg, "packet", "");
  GaussianPacketSpec p;
  p.x0 = need_num(j, "x0", "/packet");
  p.y0 = opt_num(j, "y0", 0.0);
  p.kx = opt_num(j, "kx", 0.0);
  p.ky = opt_num(j, "ky", 0.0);
  p.sigma_x = need_num(j, "sigma_x", "/packet");
  if (j.contains("sigma_y") && !j.at("sigma_y").is_null())
    p.sigma_y = need_num(j, "sigma_y", "/packet");
  else
    p.sigma_y.reset();
  p.transverse_ground = opt_bool(j, "transverse_ground", false);
  return p;
}

std::optional<AbsorberSpec> parse_absorber(const Json& cfg, const LatticeGrid& grid,
                                           const GaussianPacketSpec& packet,
                                           const PhysicalParams& params) {
  if (grid.boundary_x != Boundary::AbsorbingLayer) return std::nullopt;
  AbsorberSpec ab;
  if (cfg.contains("absorber")) {
    const Json& j = cfg.at("absorber");
    ab.margin_frac = opt_num(j, "margin_frac", ab.margin_frac);
    ab.strength = opt_num(j, "strength", ab.strength);
    ab.power = opt_int(j, "power", ab.power);
    if (j.contains("e_ref") && j.at("e_ref").is_number()) {
      ab.e_ref = j.at("e_ref").get<double>();
      return ab;
    }
  }
  const double k2 = packet.kx * packet.kx + packet.ky * packet.ky;
  ab.e_ref = std::max(0.5 * params.hbar * params.hbar * k2 / params.m, 1.0);
  return ab;
}

struct RunControls {
  double dt = 1e-3;
  int steps = 0;
  int sample_every = 0;
  double solver_tol = 1e-12;
  int solver_max_iters = 3000;
};

RunControls parse_run(const Json& cfg) {
  const Json& j = need(cfg, "run", "");
  RunControls rc;
  rc.dt = need_num(j, "dt", "/run");
  if (!(rc.dt > 0.0)) fail("/run/dt", "must be > 0");
  if (j.contains("steps")) rc.steps = opt_int(j, "steps", 0);
  else rc.steps = static_cast<int>(std::lround(need_num(j, "t_final", "/run") / rc.dt));
  if (rc.steps < 1) fail("/run", "needs steps >= 1 or t_final > dt");
  rc.sample_every = opt_int(j, "sample_every", std::max(1, rc.steps / 40));
  rc.solver_tol = opt_num(j, "solver_tol", rc.solver_tol);
  rc.solver_max_iters = opt_int(j, "solver_max_iters", rc.solver_max_iters);
  return rc;
}

EigensolveOptions parse_eigen(const Json& cfg, uint64_t seed) {
  EigensolveOptions opts;
  opts.seed = seed;
  if (cfg.contains("eigen")) {
    const Json& j = cfg.at("eigen");
    opts.residual_tol = opt_num(j, "residual_tol", opts.residual_tol);
    opts.max_basis_per_round = opt_int(j, "max_basis_per_round", opts.max_basis_per_round);
    opts.max_total_ops = opt_int(j, "max_total_ops", opts.max_total_ops);
  }
  return opts;
}

// ---------------------------------------------------------------------------
// scenario runners
// ---------------------------------------------------------------------------

struct RunContext {
  const Json& cfg;
  fs::path dir;
  PhysicalParams params;
  uint64_t seed = 1;
  RunManifest manifest;

  void emit(const std::string& rel) { manifest.outputs.push_back(rel); }
  fs::path path(const std::string& rel) { return dir / rel; }
};

void run_classical_wall(RunContext& ctx) {
  const Json& wall_j = need(ctx.cfg, "wall", "");
  const double phi_B = need_num(wall_j, "phi_B", "/wall");
  const double x0 = opt_num(wall_j, "x0", 0.0);
  const double w = opt_num(wall_j, "w", 0.0);
  if (w < 0.0) fail("/wall/w", "width must be >= 0");

  const Json& init_j = need(ctx.cfg, "initial", "");
  ClassicalState s{need_num(init_j, "x", "/initial"), opt_num(init_j, "y", 0.0),
                   need_num(init_j, "px", "/initial"), opt_num(init_j, "py", 0.0)};
  const Json& run_j = need(ctx.cfg, "run", "");
  const double dt = need_num(run_j, "dt", "/run");
  const double t_max = need_num(run_j, "t_max", "/run");
  const double x_escape = opt_num(run_j, "x_escape", std::abs(s.x - x0) * 1.5 + 1.0);
  const int stride = std::max(1, static_cast<int>(std::lround(opt_num(run_j, "sample_dt", dt) / dt)));

  FieldRegionSet fields;
  if (w > 0.0)
    fields.regions.push_back({x0 - 0.5 * w, x0 + 0.5 * w, -1e12, 1e12, phi_B / w});
  else
    fields.walls.push_back({x0, phi_B});
  fields.validate();

  const ClassicalState initial = s;
  Trajectory traj;
  traj.points.push_back({0.0, s});
  double t = 0.0;
  int step = 0;
  while (t < t_max) {
    s = step_charge(s, fields, dt, ctx.params);
    t += dt;
    ++step;
    if (step % stride == 0) traj.points.push_back({t, s});
    const bool outside = std::abs(s.x - x0) > x_escape;
    const bool leaving = (s.x - x0) * s.px > 0.0;
    if (outside && leaving) break;
  }
  if (traj.points.back().t != t) traj.points.push_back({t, s});
  traj.write_csv(ctx.path("trajectory.csv").string());
  ctx.emit("trajectory.csv");

  const bool crossed = (initial.x < x0 && s.x > x0) || (initial.x > x0 && s.x < x0);
  const double speed_drift =
      std::abs(s.speed(ctx.params) - initial.speed(ctx.params));
  const double dpy = s.py - initial.py;

  ctx.manifest.summary["reflected"] = crossed ? 0.0 : 1.0;
  ctx.manifest.summary["delta_py"] = dpy;
  ctx.manifest.summary["expected_kick"] = wall_crossing_kick(phi_B, ctx.params);
  ctx.manifest.summary["speed_drift"] = speed_drift;
  ctx.manifest.summary["t_end"] = t;
  ctx.manifest.invariants["speed_conserved"] = speed_drift < 1e-9;
  if (crossed)
    ctx.manifest.invariants["universal_kick"] =
        std::abs(dpy - wall_crossing_kick(phi_B, ctx.params)) < 1e-9;
  else
    ctx.manifest.invariants["reflection_symmetric"] = std::abs(dpy) < 1e-9;
}

void run_classical_cavity(RunContext& ctx) {
  const Json& cav = need(ctx.cfg, "cavity", "");
  const double L_cav = need_num(cav, "L_cav", "/cavity");
  const double D = need_num(cav, "D", "/cavity");
  const double phi_B = need_num(cav, "phi_B", "/cavity");

  const Json& init_j = need(ctx.cfg, "initial", "");
  ClassicalState s{opt_num(init_j, "x", 0.0), opt_num(init_j, "y", 0.0),
                   need_num(init_j, "px", "/initial"), need_num(init_j, "py", "/initial")};
  const Json& run_j = need(ctx.cfg, "run", "");
  const double default_horizon =
      phi_B != 0.0 ? 1000.0 * 2.0 * std::numbers::pi * ctx.params.m * D /
                         std::abs(ctx.params.q * phi_B)
                   : 100.0;
  const double t_max = opt_num(run_j, "t_max", default_horizon);
  const double sample_dt = opt_num(run_j, "sample_dt", 0.0);

  CavityRun run = simulate_cavity(L_cav, D, phi_B, s, t_max, ctx.params, sample_dt);
  run.trajectory.write_csv(ctx.path("trajectory.csv").string());
  ctx.emit("trajectory.csv");

  const double v0 = s.speed(ctx.params);
  const double v1 = run.trajectory.points.back().state.speed(ctx.params);
  ctx.manifest.summary["trapped"] = run.trapped ? 1.0 : 0.0;
  ctx.manifest.summary["t_end"] = run.t_end;
  ctx.manifest.summary["speed_drift"] = std::abs(v1 - v0);
  ctx.manifest.invariants["speed_conserved"] = std::abs(v1 - v0) < 1e-9;
}

struct QuantumSetup {
  LatticeGrid grid;
  LinkPhaseField links;
  SparseOperator op;
  QuantumState psi;
  RunControls rc;
  double divider = 0.0;
};

QuantumSetup prepare_quantum(RunContext& ctx, const GaugeSpec& spec, double divider) {
  QuantumSetup qs{parse_grid(ctx.cfg), LinkPhaseField{}, SparseOperator{}, QuantumState{},
                  parse_run(ctx.cfg), divider};
  GaussianPacketSpec packet = parse_packet(ctx.cfg);
  try {
    qs.links = compile_gauge(spec, qs.grid, ctx.params);
    qs.op = build_hamiltonian(qs.grid, qs.links, ctx.params,
                              parse_absorber(ctx.cfg, qs.grid, packet, ctx.params));
    qs.psi = gaussian_packet(packet, qs.grid, ctx.params);
  } catch (const std::invalid_argument& e) {
    fail("", e.what());
  }
  return qs;
}

struct SeriesRecorder {
  std::vector<std::vector<double>> rows;
  std::vector<ObservableReport> reports;
  std::vector<double> times;

  void record(double t, const ObservableReport& m) {
    times.push_back(t);
    reports.push_back(m);
    rows.push_back({t, m.norm2, m.energy, m.Px, m.Px2, m.Py, m.Py2, m.px_kin, m.py_kin,
                    m.prob_left, m.prob_right});
  }
  static std::vector<std::string> header() {
    return {"t",  "norm2", "energy", "Px",        "Px2",       "Py",
            "Py2", "px_kin", "py_kin", "prob_left", "prob_right"};
  }
};

void run_quantum_wall(RunContext& ctx) {
  const Json& wall_j = need(ctx.cfg, "wall", "");
  const double phi_B = need_num(wall_j, "phi_B", "/wall");
  const double x0 = opt_num(wall_j, "x0", 0.0);
  const double w = opt_num(wall_j, "w", 0.0);
  QuantumSetup qs = prepare_quantum(ctx, UniformWall{phi_B, x0, w}, x0);

  SeriesRecorder series;
  EvolveOptions opts;
  opts.dt = qs.rc.dt;
  opts.steps = qs.rc.steps;
  opts.solver_tol = qs.rc.solver_tol;
  opts.solver_max_iters = qs.rc.solver_max_iters;
  opts.sample_every = qs.rc.sample_every;
  opts.absorb_divider_x = x0;
  opts.observer = [&](int, double t, const QuantumState& s) {
    series.record(t, measure(s, qs.op, x0));
  };

  const bool snapshots = ctx.cfg.contains("output") &&
                         opt_bool(ctx.cfg.at("output"), "snapshots", false);
  if (snapshots) {
    write_density_snapshot(ctx.path("density_initial").string(), qs.psi, {{"t", 0.0}});
    ctx.emit("density_initial.csv");
    ctx.emit("density_initial.json");
  }

  EvolveResult res = evolve(qs.psi, qs.op, opts);
  write_csv(ctx.path("observables.csv").string(), SeriesRecorder::header(), series.rows);
  ctx.emit("observables.csv");
  if (snapshots) {
    write_density_snapshot(ctx.path("density_final").string(), res.state,
                           {{"t", qs.rc.dt * qs.rc.steps}});
    ctx.emit("density_final.csv");
    ctx.emit("density_final.json");
  }

  const ObservableReport& first = series.reports.front();
  const ObservableReport& last = series.reports.back();
  double py_drift = 0.0, energy_drift = 0.0, norm_drift = 0.0;
  for (const auto& m : series.reports) {
    py_drift = std::max(py_drift, std::abs(m.Py - first.Py));
    energy_drift = std::max(energy_drift, std::abs(m.energy - first.energy));
    norm_drift = std::max(norm_drift, std::abs(m.norm2 - first.norm2));
  }

  const double transmission = last.prob_right + res.absorbed_right;
  const double reflection = last.prob_left + res.absorbed_left;
  ctx.manifest.summary["transmission"] = transmission;
  ctx.manifest.summary["reflection"] = reflection;
  ctx.manifest.summary["absorbed_left"] = res.absorbed_left;
  ctx.manifest.summary["absorbed_right"] = res.absorbed_right;
  ctx.manifest.summary["Py_drift"] = py_drift;
  ctx.manifest.summary["py_kin_shift"] = last.py_kin - first.py_kin;
  ctx.manifest.summary["energy_drift"] = energy_drift;
  ctx.manifest.summary["oracle_T"] = step_transmission_oracle(
      std::max(parse_packet(ctx.cfg).kx, 1e-12), parse_packet(ctx.cfg).ky, phi_B, ctx.params);
  ctx.manifest.summary["blocked_by_moments"] =
      crossing_blocked(first.Px2, first.Py, phi_B, ctx.params) ? 1.0 : 0.0;

  ctx.manifest.invariants["partition_unity"] =
      std::abs(transmission + reflection - 1.0) < 1e-7;
  ctx.manifest.invariants["py_canonical_conserved"] = py_drift < 1e-6;
  if (qs.op.hermitian) {
    ctx.manifest.invariants["norm_conserved"] = norm_drift < 1e-10 * qs.rc.steps;
    ctx.manifest.invariants["energy_conserved"] = energy_drift < 1e-8;
  }
}

void run_lattice_diffraction(RunContext& ctx) {
  const Json& lat_j = need(ctx.cfg, "lattice", "");
  const double Phi_B = need_num(lat_j, "Phi_B", "/lattice");
  const double L = need_num(lat_j, "L", "/lattice");
  const double x0 = opt_num(lat_j, "x0", 0.0);
  QuantumSetup qs = prepare_quantum(ctx, FluxLineLattice{Phi_B, L, x0}, x0);

  EvolveOptions opts;
  opts.dt = qs.rc.dt;
  opts.steps = qs.rc.steps;
  opts.solver_tol = qs.rc.solver_tol;
  opts.solver_max_iters = qs.rc.solver_max_iters;
  opts.absorb_divider_x = x0;
  EvolveResult res = evolve(qs.psi, qs.op, opts);

  DiffractionOptions dopts;
  const Json* dj = ctx.cfg.contains("diffraction") ? &ctx.cfg.at("diffraction") : nullptr;
  dopts.x_cut = dj ? opt_num(*dj, "x_cut", x0 + 2.0 * L) : x0 + 2.0 * L;
  dopts.noise_floor = dj ? opt_num(*dj, "noise_floor", 1e-3) : 1e-3;
  dopts.min_transmitted = dj ? opt_num(*dj, "min_transmitted", 0.05) : 0.05;

  const GaussianPacketSpec packet = parse_packet(ctx.cfg);
  DiffractionSpectrum spec;
  try {
    spec = momentum_transfer_spectrum(res.state, qs.links, L, packet.ky, ctx.params, dopts);
  } catch (const std::invalid_argument& e) {
    throw SolverError(std::string("diffraction analysis failed: ") + e.what());
  }

  std::vector<std::vector<double>> rows;
  for (const auto& p : spec.peaks)
    rows.push_back({static_cast<double>(p.order), p.dp_y, p.weight});
  write_csv(ctx.path("spectrum.csv").string(), {"n", "dp_y", "weight"}, rows);
  ctx.emit("spectrum.csv");

  ctx.manifest.summary["transmitted"] = spec.transmitted_weight;
  ctx.manifest.summary["n_peaks"] = static_cast<double>(spec.peaks.size());
  ctx.manifest.summary["worst_comb_offset_bins"] = spec.worst_comb_offset_bins();
  ctx.manifest.summary["bin_width"] = spec.bin_width;
  ctx.manifest.summary["min_deflection"] = minimum_deflection(Phi_B, L, ctx.params);
  for (const auto& p : spec.peaks)
    if (std::abs(p.order) <= 2)
      ctx.manifest.summary["weight_order_" + std::to_string(p.order)] = p.weight;
  ctx.manifest.invariants["peaks_on_comb"] = spec.worst_comb_offset_bins() <= 1.0;
  double wsum = 0.0;
  for (const auto& p : spec.peaks) wsum += p.weight;
  ctx.manifest.invariants["weights_bounded"] = wsum <= 1.0 + 1e-9;
}

void run_flux_line_cavity(RunContext& ctx) {
  const Json& cav = need(ctx.cfg, "cavity", "");
  CavityConfig cc;
  cc.L_cav = need_num(cav, "L_cav", "/cavity");
  cc.D = need_num(cav, "D", "/cavity");
  cc.Phi_B = need_num(cav, "Phi_B", "/cavity");
  cc.length_x = opt_num(cav, "length_x", 8.0);
  cc.a = opt_num(cav, "a", 1.0 / 64.0);
  try {
    cc.validate();
  } catch (const std::exception& e) {
    fail("/cavity", e.what());
  }
  const int k = opt_int(ctx.cfg.contains("eigen") ? ctx.cfg.at("eigen") : Json::object(), "k", 10);
  const double loc_threshold =
      ctx.cfg.contains("analysis")
          ? opt_num(ctx.cfg.at("analysis"), "localization_threshold", 0.9)
          : 0.9;

  CavitySystem sys = build_flux_line_cavity(cc, ctx.params);
  const double phi_B = cc.Phi_B / cc.L_cav;
  const double ceiling = crossing_energy(cc.L_cav, phi_B, ctx.params);
  BoundStateSearch search =
      find_bound_state(sys, k, ceiling, loc_threshold, parse_eigen(ctx.cfg, ctx.seed));

  Json spectrum;
  spectrum["eigenvalues"] = search.spectrum.eigenvalues;
  spectrum["residuals"] = search.spectrum.residuals;
  std::vector<double> locs;
  for (size_t i = 0; i < search.spectrum.eigenvalues.size(); ++i)
    locs.push_back(search.spectrum.localization(static_cast<int>(i), sys.inter_flux));
  spectrum["inter_flux_localization"] = locs;
  spectrum["crossing_energy"] = ceiling;
  spectrum["box_ground_energy"] = box_ground_energy(cc.L_cav, cc.D, ctx.params);
  spectrum["threshold_D"] = std::numbers::pi * ctx.params.hbar / std::abs(ctx.params.q * phi_B);
  spectrum["line_x"] = sys.line_x;
  write_json(ctx.path("spectrum.json").string(), spectrum);
  ctx.emit("spectrum.json");

  const bool snapshots = ctx.cfg.contains("output") &&
                         opt_bool(ctx.cfg.at("output"), "snapshots", false);
  if (snapshots && search.found) {
    write_density_snapshot(ctx.path("bound_state").string(),
                           search.spectrum.states[search.index],
                           {{"energy", search.energy}});
    ctx.emit("bound_state.csv");
    ctx.emit("bound_state.json");
  }

  ctx.manifest.summary["bound_found"] = search.found ? 1.0 : 0.0;
  ctx.manifest.summary["bound_energy"] = search.found ? search.energy : 0.0;
  ctx.manifest.summary["bound_localization"] = search.localization;
  ctx.manifest.summary["crossing_energy"] = ceiling;
  ctx.manifest.summary["bound_states_predicted"] =
      bound_states_exist(cc.D, phi_B, ctx.params) ? 1.0 : 0.0;
  double max_res = 0.0;
  for (double r : search.spectrum.residuals) max_res = std::max(max_res, r);
  ctx.manifest.invariants["eigensolver_residuals"] = max_res < 1e-8;
}

void run_flux_grid_landau(RunContext& ctx) {
  const Json& lj = need(ctx.cfg, "landau", "");
  const double B = need_num(lj, "B", "/landau");
  const double L = need_num(lj, "L", "/landau");
  const double box = need_num(lj, "box", "/landau");
  const double a = need_num(lj, "a", "/landau");
  const int k = opt_int(ctx.cfg.contains("eigen") ? ctx.cfg.at("eigen") : Json::object(), "k", 8);

  LandauLevelOptions lopts;
  if (ctx.cfg.contains("levels")) {
    const Json& j = ctx.cfg.at("levels");
    lopts.n_levels = opt_int(j, "n_levels", lopts.n_levels);
    lopts.k_per_level = opt_int(j, "k_per_level", lopts.k_per_level);
    lopts.bulk_margin_lengths = opt_num(j, "bulk_margin_lengths", lopts.bulk_margin_lengths);
    lopts.bulk_threshold = opt_num(j, "bulk_threshold", lopts.bulk_threshold);
    lopts.window = opt_num(j, "window", lopts.window);
  }

  const double Phi_B = B * L * L;
  FluxGridSpectrum fgs;
  try {
    fgs = flux_grid_spectrum(Phi_B, L, BoxDomain{box, box, a}, ctx.params, k,
                             parse_eigen(ctx.cfg, ctx.seed));
  } catch (const std::invalid_argument& e) {
    fail("/landau", e.what());
  }
  LandauLevelReport rep =
      landau_levels_report(fgs.op, B, lopts, parse_eigen(ctx.cfg, ctx.seed));

  Json out;
  out["eigenvalues"] = fgs.spectrum.eigenvalues;
  out["residuals"] = fgs.spectrum.residuals;
  out["effective_B"] = fgs.effective_B;
  out["Phi_B"] = Phi_B;
  write_json(ctx.path("spectrum.json").string(), out);
  ctx.emit("spectrum.json");

  Json levels;
  levels["reference"] = rep.reference;
  levels["estimate"] = rep.estimate;
  levels["cluster_size"] = rep.cluster_size;
  levels["max_rel_error"] = rep.max_rel_error;
  write_json(ctx.path("levels.json").string(), levels);
  ctx.emit("levels.json");

  ctx.manifest.summary["E0"] = fgs.spectrum.eigenvalues.empty() ? 0.0 : fgs.spectrum.eigenvalues[0];
  ctx.manifest.summary["level_err_max"] = rep.max_rel_error;
  ctx.manifest.summary["effective_B"] = fgs.effective_B;
  for (size_t n = 0; n < rep.estimate.size(); ++n)
    ctx.manifest.summary["level_" + std::to_string(n)] = rep.estimate[n];
  double max_res = 0.0;
  for (double r : fgs.spectrum.residuals) max_res = std::max(max_res, r);
  ctx.manifest.invariants["eigensolver_residuals"] = max_res < 1e-8;
}

void run_emergence(RunContext& ctx) {
  const Json& ej = need(ctx.cfg, "emergence", "");
  EmergenceConfig ec;
  ec.B0 = opt_num(ej, "B0", ec.B0);
  ec.alpha = opt_num(ej, "alpha", ec.alpha);
  ec.grid_L = opt_num(ej, "grid_L", ec.grid_L);
  ec.a = opt_num(ej, "a", ec.a);
  ec.half_width = opt_num(ej, "half_width", ec.half_width);
  ec.x0 = opt_num(ej, "x0", ec.x0);
  ec.y0 = opt_num(ej, "y0", ec.y0);
  ec.vx = opt_num(ej, "vx", ec.vx);
  ec.vy = opt_num(ej, "vy", ec.vy);
  ec.sigma = opt_num(ej, "sigma", ec.sigma);
  ec.duration = opt_num(ej, "duration", ec.duration);
  ec.dt = opt_num(ej, "dt", ec.dt);
  ec.sample_every = opt_int(ej, "sample_every", ec.sample_every);
  ec.deriv_window_crossings = opt_num(ej, "deriv_window_crossings", ec.deriv_window_crossings);
  ec.spread_budget = opt_num(ej, "spread_budget", ec.spread_budget);
  ec.solver_tol = opt_num(ej, "solver_tol", ec.solver_tol);
  try {
    ec.validate();
  } catch (const std::exception& e) {
    fail("/emergence", e.what());
  }

  EmergenceReport rep = run_emergence_experiment(ec, ctx.params);

  std::vector<std::vector<double>> rows;
  for (const auto& s : rep.samples)
    rows.push_back({s.t, s.rx, s.ry, s.px, s.py, s.width_x, s.width_y, s.norm2});
  write_csv(ctx.path("timeseries.csv").string(),
            {"t", "rx", "ry", "px", "py", "width_x", "width_y", "norm2"}, rows);
  ctx.emit("timeseries.csv");

  rows.clear();
  for (const auto& f : rep.force)
    rows.push_back({f.t, f.measured.x, f.measured.y, f.predicted.x, f.predicted.y, f.rel_dev});
  write_csv(ctx.path("force.csv").string(),
            {"t", "fx_meas", "fy_meas", "fx_pred", "fy_pred", "rel_dev"}, rows);
  ctx.emit("force.csv");

  Json out;
  out["fitted_radius"] = rep.fitted_radius;
  out["reference_radius"] = rep.reference_radius;
  out["max_rel_force_dev"] = rep.max_rel_force_dev;
  out["max_abs_force_dev"] = rep.max_abs_force_dev;
  out["pre_spread_samples"] = rep.pre_spread_samples;
  out["flux_lines"] = rep.flux_lines;
  write_json(ctx.path("report.json").string(), out);
  ctx.emit("report.json");

  ctx.manifest.summary["fitted_radius"] = rep.fitted_radius;
  ctx.manifest.summary["reference_radius"] = rep.reference_radius;
  if (rep.reference_radius > 0.0)
    ctx.manifest.summary["radius_rel_err"] =
        std::abs(rep.fitted_radius - rep.reference_radius) / rep.reference_radius;
  ctx.manifest.summary["max_rel_force_dev"] = rep.max_rel_force_dev;
  ctx.manifest.summary["max_abs_force_dev"] = rep.max_abs_force_dev;
  ctx.manifest.summary["pre_spread_samples"] = rep.pre_spread_samples;
}

using Runner = void (*)(RunContext&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"classical-wall", run_classical_wall},
      {"classical-cavity", run_classical_cavity},
      {"quantum-wall", run_quantum_wall},
      {"flux-line-cavity", run_flux_line_cavity},
      {"lattice-diffraction", run_lattice_diffraction},
      {"flux-grid-landau", run_flux_grid_landau},
      {"emergence", run_emergence},
  };
  return table;
}

}  // namespace

Json RunManifest::to_json() const {
  Json j;
  j["scenario"] = scenario;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["wall_clock_sec"] = wall_clock_sec;
  j["invariants"] = invariants;
  j["summary"] = summary;
  j["outputs"] = outputs;
  return j;
}

std::string config_hash(const Json& config) {
  const std::string dump = config.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void validate_config(const Json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  const Json& s = need(config, "scenario", "");
  if (!s.is_string()) fail("/scenario", "expected a string");
  if (runners().find(s.get<std::string>()) == runners().end())
    fail("/scenario", "unknown scenario kind: " + s.get<std::string>());
  parse_params(config);

  // Dry parse of the scenario-specific blocks. Runner-level checks on values
  // (grids, packets) run again at execution time.
  const std::string kind = s.get<std::string>();
  if (kind == "classical-wall") {
    need(config, "wall", "");
    need_num(need(config, "initial", ""), "x", "/initial");
    need_num(need(config, "wall", ""), "phi_B", "/wall");
    need_num(need(config, "run", ""), "dt", "/run");
    need_num(need(config, "run", ""), "t_max", "/run");
  } else if (kind == "classical-cavity") {
    const Json& c = need(config, "cavity", "");
    need_num(c, "L_cav", "/cavity");
    need_num(c, "D", "/cavity");
    need_num(c, "phi_B", "/cavity");
    need(config, "initial", "");
  } else if (kind == "quantum-wall") {
    parse_grid(config);
    parse_packet(config);
    parse_run(config);
    need_num(need(config, "wall", ""), "phi_B", "/wall");
  } else if (kind == "lattice-diffraction") {
    parse_grid(config);
    parse_packet(config);
    parse_run(config);
    const Json& l = need(config, "lattice", "");
    need_num(l, "Phi_B", "/lattice");
    need_num(l, "L", "/lattice");
  } else if (kind == "flux-line-cavity") {
    const Json& c = need(config, "cavity", "");
    need_num(c, "L_cav", "/cavity");
    need_num(c, "D", "/cavity");
    need_num(c, "Phi_B", "/cavity");
  } else if (kind == "flux-grid-landau") {
    const Json& l = need(config, "landau", "");
    need_num(l, "B", "/landau");
    need_num(l, "L", "/landau");
    need_num(l, "box", "/landau");
    need_num(l, "a", "/landau");
  } else if (kind == "emergence") {
    need(config, "emergence", "");
  }
}

RunManifest run_scenario(const Json& config, const fs::path& out_dir) {
  validate_config(config);
  fs::create_directories(out_dir);

  RunContext ctx{config, out_dir, parse_params(config),
                 static_cast<uint64_t>(opt_int(config, "seed", 1)), RunManifest{}};
  ctx.manifest.scenario = config.at("scenario").get<std::string>();
  ctx.manifest.config_hash = config_hash(config);

  const auto start = std::chrono::steady_clock::now();
  runners().at(ctx.manifest.scenario)(ctx);
  ctx.manifest.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_json((out_dir / "manifest.json").string(), ctx.manifest.to_json());
  return ctx.manifest;
}

SweepResult sweep(const Json& base_config, const std::string& param_path,
                  const std::vector<Json>& values, const fs::path& out_root) {
  validate_config(base_config);
  std::string ptr = param_path;
  if (!ptr.empty() && ptr.front() != '/') {
    for (auto& c : ptr)
      if (c == '.') c = '/';
    ptr = "/" + ptr;
  }
  Json probe = base_config;
  const Json::json_pointer jp(ptr);
  if (!values.empty()) {
    try {
      probe.at(jp);
    } catch (const Json::exception&) {
      throw ConfigError("sweep: parameter path not present in config: " + param_path);
    }
  }

  SweepResult result;
  result.param_path = param_path;
  fs::create_directories(out_root);

  std::vector<std::string> metric_keys;
  for (size_t i = 0; i < values.size(); ++i) {
    Json cfg = base_config;
    cfg[jp] = values[i];
    char name[32];
    std::snprintf(name, sizeof(name), "row_%03zu", i);
    SweepRow row;
    row.value = values[i];
    try {
      RunManifest m = run_scenario(cfg, out_root / name);
      row.status = "ok";
      row.summary = m.summary;
      for (const auto& [k, v] : m.summary)
        if (std::find(metric_keys.begin(), metric_keys.end(), k) == metric_keys.end())
          metric_keys.push_back(k);
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    result.rows.push_back(std::move(row));
  }

  std::sort(metric_keys.begin(), metric_keys.end());
  std::vector<std::string> header{"value", "status"};
  header.insert(header.end(), metric_keys.begin(), metric_keys.end());
  std::ofstream out(out_root / "sweep.csv");
  out << std::setprecision(17);
  for (size_t c = 0; c < header.size(); ++c) out << header[c] << (c + 1 < header.size() ? "," : "");
  out << '\n';
  for (const auto& row : result.rows) {
    out << row.value.dump() << ',' << (row.status == "ok" ? "ok" : "failed");
    for (const auto& k : metric_keys) {
      out << ',';
      auto it = row.summary.find(k);
      if (it != row.summary.end()) out << it->second;
    }
    out << '\n';
  }

  Json j;
  j["param"] = param_path;
  j["rows"] = Json::array();
  for (const auto& row : result.rows) {
    Json r;
    r["value"] = row.value;
    r["status"] = row.status;
    r["summary"] = row.summary;
    j["rows"].push_back(r);
  }
  write_json((out_root / "sweep.json").string(), j);
  return result;
}

Json preset_config(const std::string& name) {
  const auto& table = presets();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown preset: " + name);
  return Json::parse(it->second.config_text);
}

}  // namespace flux::harness
