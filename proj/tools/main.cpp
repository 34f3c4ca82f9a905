#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "flux/evolve.hpp"
#include "flux/harness.hpp"

namespace fs = std::filesystem;
using flux::harness::ConfigError;
using flux::Json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

Json load_config(const std::string& spec) {
  if (fs::exists(spec)) {
    std::ifstream in(spec);
    try {
      return Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("cannot parse ") + spec + ": " + e.what());
    }
  }
  return flux::harness::preset_config(spec);  // throws ConfigError when unknown
}

fs::path output_root(const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("FLUXLATTICE_OUT")) return env;
  return "out";
}

fs::path run_dir_for(const Json& cfg, const fs::path& root) {
  std::string name = cfg.value("scenario", "run");
  if (cfg.contains("output") && cfg.at("output").is_object())
    name = cfg.at("output").value("dir", name);
  return root / name;
}

std::vector<Json> parse_values(const std::string& csv) {
  std::vector<Json> out;
  std::string token;
  std::stringstream ss(csv);
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      out.push_back(Json::parse(token));
    } catch (const Json::exception&) {
      out.push_back(token);  // bare strings are allowed
    }
  }
  return out;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const flux::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluxlattice: charged-particle dynamics in magnetic flux configurations"};
  app.require_subcommand(1);

  std::string config_spec, out_override, param_path, values_csv;

  auto* run = app.add_subcommand("run", "Execute a scenario config or preset");
  run->add_option("config", config_spec, "Config file path or preset name")->required();
  run->add_option("--out", out_override, "Output root (default $FLUXLATTICE_OUT or ./out)");

  auto* sw = app.add_subcommand("sweep", "Run a config once per parameter value");
  sw->add_option("config", config_spec, "Config file path or preset name")->required();
  sw->add_option("--param", param_path, "Parameter path, e.g. packet.kx")->required();
  sw->add_option("--values", values_csv, "Comma-separated values")->required();
  sw->add_option("--out", out_override, "Output root");

  auto* pr = app.add_subcommand("presets", "Preset utilities");
  auto* pr_list = pr->add_subcommand("list", "List bundled presets");

  auto* val = app.add_subcommand("validate", "Validate a config without running it");
  val->add_option("config", config_spec, "Config file path or preset name")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return guarded([&] {
      const Json cfg = load_config(config_spec);
      flux::harness::validate_config(cfg);
      const fs::path dir = run_dir_for(cfg, output_root(out_override));
      const auto manifest = flux::harness::run_scenario(cfg, dir);
      std::cout << "wrote " << (dir / "manifest.json").string() << '\n';
      for (const auto& [name, ok] : manifest.invariants)
        std::cout << "  invariant " << name << ": " << (ok ? "pass" : "FAIL") << '\n';
    });
  }
  if (sw->parsed()) {
    return guarded([&] {
      const Json cfg = load_config(config_spec);
      const auto values = parse_values(values_csv);
      const fs::path root = output_root(out_override) / (run_dir_for(cfg, "").string() + "-sweep");
      const auto result = flux::harness::sweep(cfg, param_path, values, root);
      std::cout << "wrote " << (root / "sweep.csv").string() << " (" << result.rows.size()
                << " rows)\n";
    });
  }
  if (pr_list->parsed()) {
    for (const auto& [name, preset] : flux::harness::presets())
      std::cout << name << " - " << preset.description << '\n';
    return 0;
  }
  if (val->parsed()) {
    return guarded([&] {
      flux::harness::validate_config(load_config(config_spec));
      std::cout << "ok\n";
    });
  }
  return 0;
}
