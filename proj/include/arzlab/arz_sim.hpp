#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arzlab/fundamental_diagram.hpp"

namespace arzlab {

class Controller;

struct Grid1D {
  double length = 0;  // m
  int n_cells = 0;
  double dx = 0;

  Grid1D() = default;
  Grid1D(double length_, int n_cells_);
  double center(int i) const { return (i + 0.5) * dx; }
};

/// Cell-averaged density/speed on a Grid1D at time t.
struct TrafficState {
  std::vector<double> rho;  // veh/m
  std::vector<double> v;    // m/s
  double t = 0;             // s
};

struct SimConfig {
  Grid1D grid;
  double horizon = 300;  // s
  double cfl = 0.8;
  double tau = 60;  // s
  std::shared_ptr<const FundamentalDiagram> fd;
  Equilibrium eq;
  int n_out_x = 101;  // output sampling, decoupled from the internal grid
  int n_out_t = 301;

  void validate() const;
};

enum class InitialKind {
  Sinusoidal3Pi,        // rho = rho*(1 + 0.1 sin(3 pi x/L)), v = v*(1 - 0.1 sin)
  SinusoidalPi,         // q = q*(1 + 0.05 sin(pi x/L)), v = v*(1 - 0.05 sin)
  Linear,               // v = v*(1 - 0.1 x/L), q = q*(1 - 0.05 x/L)
  ConstantEquilibrium,  // rho = rho*, v = v*
};

TrafficState make_initial(InitialKind kind, const Equilibrium& eq,
                          const Grid1D& grid, double rho_max);

/// Custom profile: rho(x) and v(x) sampled at cell centers, validated against
/// the state invariants (0 < rho <= rho_max, v > 0).
TrafficState make_initial(const std::function<double(double)>& rho_profile,
                          const std::function<double(double)>& v_profile,
                          const Grid1D& grid, double rho_max);

struct StepInfo {
  double dt = 0;        // s, the CFL step actually taken
  double mass_in = 0;   // veh entering through x=0 during the step
  double mass_out = 0;  // veh leaving through x=L during the step
};

/// One finite-volume update of the traffic system in conservative variables
/// (rho, y) with y = rho (v - V(rho)): HLL flux with the two characteristic
/// speeds, then the exact relaxation substep y <- y exp(-dt/tau).  Ghost
/// cells realize the flow inlet rho(0,t) v(0,t) = q* and the actuated outlet
/// v(L,t) = q(L,t)/rho* + u.  Throws NumericalError on blow-up.
StepInfo step(TrafficState& state, const SimConfig& cfg, double u);

/// Full trajectory resampled onto a fixed (t, x) output grid, row-major
/// rho/v of shape n_t x n_x; u holds the applied boundary control at each
/// output time.
struct ScenarioResult {
  std::vector<double> t;    // s
  std::vector<double> x;    // m
  std::vector<double> rho;  // veh/m, n_t * n_x
  std::vector<double> v;    // m/s
  std::vector<double> u;    // m/s, n_t
  Equilibrium eq;
  double wall_time = 0;  // s spent inside run_closed_loop
  int n_steps = 0;       // internal steps == controller evaluations taken
  std::vector<std::string> warnings;

  int n_t() const { return static_cast<int>(t.size()); }
  int n_x() const { return static_cast<int>(x.size()); }
  double rho_at(int it, int ix) const { return rho[it * n_x() + ix]; }
  double v_at(int it, int ix) const { return v[it * n_x() + ix]; }

  /// CSV with header `t,x,rho,v,u`, units km/h and veh/km (time in s,
  /// position in m), one row per (t, x) sample.
  void write_csv(const std::string& path) const;
  static ScenarioResult read_csv(const std::string& path);
};

/// Integrates from `ic` to cfg.horizon, querying the controller at every
/// internal step and recording the output samples at the nearest internal
/// step to each output time.
ScenarioResult run_closed_loop(const TrafficState& ic, const SimConfig& cfg,
                               Controller& controller);

}  // namespace arzlab
