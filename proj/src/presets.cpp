#include "arzlab/presets.hpp"

#include <cmath>

namespace arzlab {

namespace {

Scenario benchmark(const std::string& name, int n_cells) {
  Scenario s;
  s.name = name;
  s.cfg.grid = Grid1D(500.0, n_cells);
  s.cfg.horizon = 300;
  s.cfg.tau = 60;
  s.cfg.fd = std::make_shared<GreenshieldsFD>(40.0, 0.16, 1.0);
  s.cfg.eq = equilibrium_from_density(*s.cfg.fd, 0.12);
  return s;
}

/// A prescribed (rho*, v*) operating pair fixes the speed-exponent of the diagram:
/// v* = v_f (1 - (rho*/rho_m)^gamma)  =>  gamma from the row itself.
Scenario demand(const std::string& name, int n_cells, double rho_star_veh_km,
                double v_star_km_h) {
  const double v_f = 40.0, rho_m = 0.16;
  const double rho_star = rho_star_veh_km / 1000.0;
  const double v_star = v_star_km_h / 3.6;
  const double gamma =
      std::log(1.0 - v_star / v_f) / std::log(rho_star / rho_m);
  Scenario s;
  s.name = name;
  s.cfg.grid = Grid1D(500.0, n_cells);
  s.cfg.horizon = 300;
  s.cfg.tau = 60;
  s.cfg.fd = std::make_shared<GreenshieldsFD>(v_f, rho_m, gamma);
  s.cfg.eq = equilibrium_from_density(*s.cfg.fd, rho_star);
  return s;
}

}  // namespace

Scenario make_preset(const std::string& name, int n_cells) {
  if (name == "paper_4_1") return benchmark(name, n_cells);
  if (name == "demand_high") return demand(name, n_cells, 100.0, 20.25);
  if (name == "demand_medium") return demand(name, n_cells, 110.0, 16.87);
  if (name == "demand_low") return demand(name, n_cells, 120.0, 13.5);
  if (name == "nonrecurrent_sin") {
    Scenario s = benchmark(name, n_cells);
    s.ic = InitialKind::SinusoidalPi;
    return s;
  }
  if (name == "nonrecurrent_linear") {
    Scenario s = benchmark(name, n_cells);
    s.ic = InitialKind::Linear;
    return s;
  }
  if (name == "ngsim_calibrated") {
    Scenario s;
    s.name = name;
    s.cfg.grid = Grid1D(500.0, n_cells);
    s.cfg.horizon = 700;
    s.cfg.tau = 60;
    s.cfg.fd = std::make_shared<ThreeParamFD>(1339.38 / 3600.0, 16.53, 0.28,
                                              800.0 / 1000.0);
    s.cfg.eq = equilibrium_from_density(*s.cfg.fd, 320.0 / 1000.0);
    return s;
  }
  throw DomainError("unknown preset '" + name + "'");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "paper_4_1",        "demand_high",       "demand_medium",
      "demand_low",       "nonrecurrent_sin",  "nonrecurrent_linear",
      "ngsim_calibrated"};
  return names;
}

}  // namespace arzlab
