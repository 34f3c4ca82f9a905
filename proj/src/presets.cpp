#include "flux/harness.hpp"

namespace flux::harness {

// Bundled scenario configs. Each reproduces one of the headline experiments
// end to end with desk-scale runtimes; `fluxlattice run <name>` accepts the
// map key directly.
const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table = {
      {"fig1-classical-wall",
       {"Point charge reflected by a finite-width field wall",
        R"({
  "scenario": "classical-wall",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "wall": {"phi_B": 2.0, "x0": 0.0, "w": 0.5},
  "initial": {"x": -2.0, "y": 0.0, "px": 1.0, "py": 0.0},
  "run": {"dt": 0.005, "t_max": 20.0, "sample_dt": 0.01, "x_escape": 3.0},
  "output": {"dir": "fig1-classical-wall"}
})"}},
      {"fig2-classical-cavity",
       {"Charge trapped between two widthless field walls in a cavity",
        R"({
  "scenario": "classical-cavity",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "cavity": {"L_cav": 2.0, "D": 2.0, "phi_B": 2.0},
  "initial": {"x": 0.0, "y": 0.0, "px": 0.3464101615137755, "py": 0.2},
  "run": {"t_max": 2000.0},
  "output": {"dir": "fig2-classical-cavity"}
})"}},
      {"quantum-wall",
       {"Wave packet against a widthless field wall; transmission and momenta",
        R"({
  "scenario": "quantum-wall",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "grid": {"nx": 384, "ny": 192, "a": 0.1,
           "boundary_x": "absorbing-layer", "boundary_y": "periodic"},
  "absorber": {"margin_frac": 0.15, "strength": 2.0, "power": 2},
  "wall": {"phi_B": 2.0, "x0": 0.0, "w": 0.0},
  "packet": {"x0": -8.0, "y0": 0.0, "kx": 3.0, "ky": 0.0, "sigma_x": 2.5, "sigma_y": null},
  "run": {"dt": 0.01, "t_final": 8.0, "sample_every": 40, "solver_tol": 1e-12},
  "output": {"dir": "quantum-wall"}
})"}},
      {"fig3-lattice-diffraction",
       {"Packet diffracted by a column of flux lines; momentum-transfer comb",
        R"({
  "scenario": "lattice-diffraction",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "grid": {"nx": 384, "ny": 128, "a": 0.0625,
           "boundary_x": "absorbing-layer", "boundary_y": "periodic"},
  "absorber": {"margin_frac": 0.15, "strength": 2.0, "power": 2},
  "lattice": {"Phi_B": 1.5707963267948966, "L": 1.0, "x0": 0.0},
  "packet": {"x0": -5.5, "y0": 0.0, "kx": 6.0, "ky": 0.0, "sigma_x": 1.4, "sigma_y": null},
  "run": {"dt": 0.003, "t_final": 2.6, "solver_tol": 1e-12},
  "diffraction": {"x_cut": 2.0, "noise_floor": 1e-3, "min_transmitted": 0.05},
  "output": {"dir": "fig3-lattice-diffraction"}
})"}},
      {"fig4-flux-line-cavity",
       {"Topological bound state between two half-fluxon lines in a cavity",
        R"({
  "scenario": "flux-line-cavity",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "cavity": {"L_cav": 1.0, "D": 2.0, "Phi_B": 3.141592653589793,
             "length_x": 8.0, "a": 0.015625},
  "eigen": {"k": 10, "residual_tol": 1e-8},
  "analysis": {"localization_threshold": 0.9},
  "seed": 7,
  "output": {"dir": "fig4-flux-line-cavity"}
})"}},
      {"landau-flux-grid",
       {"Landau levels recovered from a square grid of flux lines",
        R"({
  "scenario": "flux-grid-landau",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "landau": {"B": 1.0, "L": 0.1, "box": 10.0, "a": 0.05},
  "eigen": {"k": 8, "residual_tol": 1e-8},
  "levels": {"n_levels": 3, "k_per_level": 14, "bulk_margin_lengths": 2.5,
             "bulk_threshold": 0.5, "window": 0.3},
  "seed": 11,
  "output": {"dir": "landau-flux-grid"}
})"}},
      {"fig5-emergence",
       {"Cyclotron orbit and Lorentz force emerging from a flux grid",
        R"({
  "scenario": "emergence",
  "params": {"hbar": 1.0, "q": 1.0, "m": 1.0},
  "emergence": {"B0": 1.0, "alpha": 0.0, "grid_L": 0.05, "a": 0.025,
                "half_width": 4.0, "x0": -1.0, "y0": 0.0, "vx": 0.0, "vy": 1.0,
                "sigma": 0.7071067811865476, "duration": 3.2, "dt": 0.004,
                "sample_every": 12, "deriv_window_crossings": 10.0,
                "spread_budget": 1.5},
  "output": {"dir": "fig5-emergence"}
})"}},
  };
  return table;
}

}  // namespace flux::harness
