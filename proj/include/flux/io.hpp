#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "flux/state.hpp"

namespace flux {

using Json = nlohmann::json;

/// CSV with full double precision; every writer in the project goes through
/// here so re-runs stay byte-identical.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

/// |psi|^2 as a ny x nx CSV matrix (rows follow y), plus a JSON sidecar with
/// grid metadata and caller-provided annotations. With binary=true the matrix
/// goes into a row-major float64 .bin instead.
void write_density_snapshot(const std::string& path_prefix, const QuantumState& state,
                            const Json& annotations, bool binary = false);

}  // namespace flux
