#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crystalline.hpp"
#include "network.hpp"

namespace netflow {

struct SvgOptions {
    double width = 640;
    double height = 640;
    double margin = 0.08;          // fraction of the canvas
    double halfline_radius = 5.0;  // truncation length for unbounded tails
    bool wulff_inset = false;      // draw the Wulff polygons in a corner
    bool cahn_hoffman_arrows = false;
};

// Deterministic standalone SVG document: curves as paths, junction dots,
// optional Wulff-shape inset and Cahn-Hoffman arrows.
std::string render_svg(const Network& net, const SvgOptions& opt,
                       const CahnHoffmanField* field = nullptr);

} // namespace netflow
