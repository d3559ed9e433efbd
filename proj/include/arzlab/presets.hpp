#pragma once

#include "arzlab/arz_sim.hpp"

namespace arzlab {

/// A fully determined experiment: diagram, operating point, grid, horizon
/// and initial-condition family.
struct Scenario {
  std::string name;
  SimConfig cfg;
  InitialKind ic = InitialKind::Sinusoidal3Pi;

  TrafficState initial() const {
    return make_initial(ic, cfg.eq, cfg.grid, cfg.fd->rho_max());
  }
};

/// Named presets:
///   paper_4_1            500 m / 300 s congested benchmark, 3-half-wave IC
///   demand_high          q* = 2025 veh/h   (rho* = 100 veh/km, v* = 20.25 km/h)
///   demand_medium        q* = 1856 veh/h   (110 veh/km, 16.87 km/h)
///   demand_low           q* = 1620 veh/h   (120 veh/km, 13.5 km/h)
///   nonrecurrent_sin     benchmark diagram, single-half-wave flow IC
///   nonrecurrent_linear  benchmark diagram, linear flow/speed ramp IC
///   ngsim_calibrated     three-parameter diagram fit to real data, 700 s
/// Throws DomainError for unknown names.
Scenario make_preset(const std::string& name, int n_cells = 3200);

const std::vector<std::string>& preset_names();

}  // namespace arzlab
