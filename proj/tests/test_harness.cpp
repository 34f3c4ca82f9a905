#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "flux/harness.hpp"

using namespace flux;
using namespace flux::harness;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("fluxlattice-test-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Json tiny_classical_config() {
  return Json::parse(R"({
    "scenario": "classical-wall",
    "wall": {"phi_B": 2.0, "x0": 0.0, "w": 0.0},
    "initial": {"x": -1.0, "y": 0.0, "px": 3.0, "py": 0.0},
    "run": {"dt": 0.01, "t_max": 5.0, "x_escape": 2.0}
  })");
}

}  // namespace

TEST_CASE("presets are bundled and valid") {
  const auto& table = presets();
  CHECK(table.size() >= 7);
  for (const auto& [name, preset] : table) {
    CAPTURE(name);
    Json cfg = Json::parse(preset.config_text);
    CHECK_NOTHROW(validate_config(cfg));
  }
  CHECK_THROWS_AS(preset_config("no-such-preset"), ConfigError);
}

TEST_CASE("validate_config rejects malformed configs") {
  CHECK_THROWS_AS(validate_config(Json::parse("[1,2,3]")), ConfigError);
  CHECK_THROWS_AS(validate_config(Json::parse(R"({"scenario":"bogus"})")), ConfigError);
  Json missing = tiny_classical_config();
  missing.erase("initial");
  CHECK_THROWS_AS(validate_config(missing), ConfigError);
  Json bad_params = tiny_classical_config();
  bad_params["params"] = {{"hbar", -1.0}};
  CHECK_THROWS_AS(validate_config(bad_params), ConfigError);
}

TEST_CASE("classical wall scenario writes trajectory and manifest") {
  fs::path dir = temp_dir("cwall");
  RunManifest m = run_scenario(tiny_classical_config(), dir);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(m.summary.at("reflected") == 0.0);  // px = 3 > |q phi_B| crosses
  CHECK(m.summary.at("delta_py") == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(m.invariants.at("universal_kick"));
  Json manifest = read_json((dir / "manifest.json").string());
  CHECK(manifest.at("scenario") == "classical-wall");
  CHECK(manifest.at("version") == std::string(kVersion));
}

TEST_CASE("identical config and seed reproduce identical bytes") {
  fs::path d1 = temp_dir("det1"), d2 = temp_dir("det2");
  run_scenario(tiny_classical_config(), d1);
  run_scenario(tiny_classical_config(), d2);
  CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
}

TEST_CASE("sweep aggregates one row per value and keeps going on failure") {
  fs::path root = temp_dir("sweep");
  Json cfg = tiny_classical_config();
  std::vector<Json> values{1.0, 3.0, -1.0};  // -1 moves away: still a valid run
  SweepResult res = sweep(cfg, "initial.px", values, root);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[0].status == "ok");
  CHECK(res.rows[0].summary.at("reflected") == 1.0);
  CHECK(res.rows[1].summary.at("reflected") == 0.0);
  CHECK(fs::exists(root / "sweep.csv"));
  CHECK(fs::exists(root / "row_002" / "manifest.json"));
}

TEST_CASE("sweep with an empty value list succeeds with an empty table") {
  fs::path root = temp_dir("sweep-empty");
  SweepResult res = sweep(tiny_classical_config(), "initial.px", {}, root);
  CHECK(res.rows.empty());
  CHECK(fs::exists(root / "sweep.csv"));
}

TEST_CASE("sweep rejects unknown parameter paths") {
  fs::path root = temp_dir("sweep-bad");
  CHECK_THROWS_AS(sweep(tiny_classical_config(), "no.such.param", {Json(1.0)}, root),
                  ConfigError);
}

TEST_CASE("classical cavity scenario reports trapping") {
  fs::path dir = temp_dir("cavity");
  Json cfg = Json::parse(R"({
    "scenario": "classical-cavity",
    "cavity": {"L_cav": 2.0, "D": 2.0, "phi_B": 2.0},
    "initial": {"x": 0.0, "y": 0.0, "px": 0.3, "py": 0.2},
    "run": {"t_max": 50.0}
  })");
  RunManifest m = run_scenario(cfg, dir);
  CHECK(m.summary.at("trapped") == 1.0);
  CHECK(m.invariants.at("speed_conserved"));
}

TEST_CASE("small quantum wall scenario end to end") {
  fs::path dir = temp_dir("qwall");
  Json cfg = Json::parse(R"({
    "scenario": "quantum-wall",
    "grid": {"nx": 128, "ny": 32, "a": 0.2,
             "boundary_x": "hard-wall", "boundary_y": "periodic"},
    "wall": {"phi_B": 1.0, "x0": 0.0, "w": 0.0},
    "packet": {"x0": -6.0, "kx": 3.0, "sigma_x": 1.2, "sigma_y": null},
    "run": {"dt": 0.01, "t_final": 4.0, "sample_every": 50},
    "output": {"snapshots": true}
  })");
  RunManifest m = run_scenario(cfg, dir);
  CHECK(fs::exists(dir / "observables.csv"));
  CHECK(fs::exists(dir / "density_final.csv"));
  CHECK(fs::exists(dir / "density_final.json"));
  CHECK(m.invariants.at("py_canonical_conserved"));
  CHECK(m.invariants.at("norm_conserved"));
  CHECK(m.summary.at("transmission") > 0.8);
  CHECK(m.summary.at("blocked_by_moments") == 0.0);
}

TEST_CASE("CLI exit codes: 0 on success, 2 on schema violations") {
  const std::string cli = FLUX_CLI_PATH;
  fs::path dir = temp_dir("cli");

  // Malformed config file -> exit 2, no outputs.
  fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"scenario\": \"bogus\"}";
  const int rc_bad =
      std::system((cli + " validate " + bad.string() + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc_bad) == 2);

  fs::path good = dir / "good.json";
  std::ofstream(good) << tiny_classical_config().dump();
  const int rc_good =
      std::system((cli + " validate " + good.string() + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc_good) == 0);

  const int rc_list = std::system((cli + " presets list > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc_list) == 0);

  const int rc_run = std::system(
      (cli + " run " + good.string() + " --out " + (dir / "out").string() + " > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(rc_run) == 0);
  CHECK(fs::exists(dir / "out" / "classical-wall" / "manifest.json"));
}
