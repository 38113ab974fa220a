#pragma once

#include <string>

#include <json.hpp>

#include "network.hpp"
#include "poly_flow.hpp"
#include "smooth_flow.hpp"

namespace netflow {

// Network file schema (version 1); see docs/network-schema.md.
Network network_from_json(const nlohmann::json& j);
Network network_from_string(const std::string& text);
nlohmann::json network_to_json(const Network& net);

Anisotropy anisotropy_from_json(const nlohmann::json& j);
nlohmann::json anisotropy_to_json(const Anisotropy& a);

nlohmann::json validation_to_json(const ValidationReport& rep);

// per-segment curvature / offsets / stability output of the `curvature` command
nlohmann::json curvature_report(const Network& net);

nlohmann::json smooth_snapshot_to_json(const SmoothSnapshot& snap,
                                       const std::vector<std::string>& curve_ids);
nlohmann::json poly_snapshot_to_json(const PolySnapshot& snap);

struct EvolveConfig {
    std::string mode;  // "smooth" | "crystalline"
    SmoothFlowConfig smooth;
    PolyFlowConfig poly;
    double T = 0.1;
    double render_radius = 5.0;  // half-line truncation for output
};

EvolveConfig evolve_config_from_json(const nlohmann::json& j);

} // namespace netflow
