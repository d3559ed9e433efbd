#pragma once

#include <string>

#include "arzlab/arz_sim.hpp"

namespace arzlab {

/// Space-time heatmap of one recorded field ("rho" or "v") as a standalone
/// SVG: one rect per (t, x) sample, blue-to-red colormap over the field
/// range, axes labeled in s / m and the field's units (veh/km or km/h).
void write_heatmap_svg(const std::string& path, const ScenarioResult& r,
                       const std::string& field);

}  // namespace arzlab
