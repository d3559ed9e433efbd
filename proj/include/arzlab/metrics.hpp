#pragma once

#include "arzlab/arz_sim.hpp"

namespace arzlab {

class Controller;

/// Nondimensional L2 deviation from the equilibrium over the cell grid:
/// sqrt( sum_i [((rho_i - rho*)/rho*)^2 + ((v_i - v*)/v*)^2] dx ).
double l2_deviation(const TrafficState& state, const Equilibrium& eq, double dx);

/// The same norm per output time of a recorded trajectory.
std::vector<double> deviation_series(const ScenarioResult& r);

/// Relative mean-squared state errors over all (t, x) samples:
/// mse_rho = mean(((rho - rho_ref)/rho*)^2), and alike for v with v*.
/// Requires identical output grids.
struct StateErrors {
  double mse_rho = 0, mse_v = 0;          // dimensionless
  double max_abs_rho = 0, max_abs_v = 0;  // veh/m, m/s
  double mean_abs_rho = 0, mean_abs_v = 0;
};
StateErrors state_errors(const ScenarioResult& r, const ScenarioResult& ref);

/// Treiber-style aggregate indices of a trajectory; acceleration
/// a = v_t + v v_x by finite differences (central in x, one-sided at the
/// time endpoints), a_t by first differences of a.
struct PerformanceIndices {
  double j_fuel = 0;     // veh (rate integrated over x, t)
  double j_comfort = 0;  // veh m^2/s^4 integrated
  double j_ttt = 0;      // veh s
};
PerformanceIndices performance_indices(const ScenarioResult& r);

/// Exponential-decay fit of a norm series: least-squares slope of log(norm)
/// between t_begin and the time the series first reaches twice its floor
/// (the mean of the final tenth).  A floor near zero means true convergence;
/// a sizeable floor is the practical-stability signature.
struct DecayFit {
  double rate = 0;  // 1/s, negative for decay
  double r_squared = 0;
  double floor = 0;
  double t_begin = 0, t_end = 0;  // fitted window
};
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& norm,
                   double t_begin = 0);

/// Mean wall-clock seconds per controller evaluation (median of `groups`
/// group means).  The state is evaluated repeatedly without stepping.
double timing_bench(Controller& c, const TrafficState& state,
                    const Equilibrium& eq, int reps = 200, int groups = 5);

/// One comparison row as emitted by the evaluation commands.
struct EvaluationReport {
  std::string controller;
  StateErrors errors;              // vs the baseline controller
  PerformanceIndices indices;
  DecayFit decay;
  double initial_deviation = 0;
  double final_deviation = 0;
  double eval_seconds = 0;   // per controller evaluation
  double setup_seconds = 0;  // one-off cost (kernel solve / model load)
  double wall_seconds = 0;   // full closed-loop run

  static std::string csv_header();
  std::string csv_row() const;
};

void write_reports_csv(const std::string& path,
                       const std::vector<EvaluationReport>& rows);

}  // namespace arzlab
