#include "flux/io.hpp"

#include <fstream>
#include <iomanip>

namespace flux {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17);
  for (size_t c = 0; c < header.size(); ++c) out << header[c] << (c + 1 < header.size() ? "," : "");
  out << '\n';
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) out << row[c] << (c + 1 < row.size() ? "," : "");
    out << '\n';
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

void write_density_snapshot(const std::string& path_prefix, const QuantumState& state,
                            const Json& annotations, bool binary) {
  const LatticeGrid& g = state.grid();
  const std::string data_path = path_prefix + (binary ? ".bin" : ".csv");
  if (binary) {
    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + data_path);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double d = std::norm(state.at(i, j));
        out.write(reinterpret_cast<const char*>(&d), sizeof(double));
      }
  } else {
    std::ofstream out(data_path);
    if (!out) throw std::runtime_error("cannot open " + data_path);
    out << std::setprecision(17);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) out << std::norm(state.at(i, j)) << (i + 1 < g.nx ? "," : "");
      out << '\n';
    }
  }

  Json meta = annotations;
  meta["grid"] = {{"nx", g.nx},
                  {"ny", g.ny},
                  {"a", g.a},
                  {"x_min", g.x_min},
                  {"y_min", g.y_min},
                  {"boundary_x", to_string(g.boundary_x)},
                  {"boundary_y", to_string(g.boundary_y)}};
  meta["norm2"] = state.norm2();
  meta["data"] = data_path;
  meta["layout"] = "rows follow y ascending, columns follow x ascending";
  write_json(path_prefix + ".json", meta);
}

}  // namespace flux
