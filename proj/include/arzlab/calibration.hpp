#pragma once

#include <string>
#include <vector>

#include "arzlab/fundamental_diagram.hpp"

namespace arzlab {

/// Space-time aggregated observations for diagram fitting.  Stored in SI
/// (veh/m, veh/s); the CSV interface speaks veh/km and veh/h.
struct AggregatedGrid {
  struct Cell {
    int x_index = 0, t_index = 0;
    double density = 0;  // veh/m
    double flow = 0;     // veh/s
  };
  std::vector<Cell> cells;
  double dx = 20;  // m
  double dt = 15;  // s
};

/// rho_m = lanes / (vehicle_length * safety_factor)  [veh/m].
double rho_max_from_geometry(double lanes, double vehicle_length,
                             double safety_factor);

/// CSV with header `x_index,t_index,density,flow` (veh/km, veh/h); rejects
/// missing columns, non-numeric rows and densities outside (0, rho_m].
AggregatedGrid ingest_grid_csv(const std::string& path, double rho_m);
void write_grid_csv(const std::string& path, const AggregatedGrid& grid);

struct FitResult {
  double zeta = 0;  // veh/s
  double kappa = 0;
  double p = 0;
  double rmse = 0;  // veh/s
  ThreeParamFD diagram() const;
  double rho_m = 0;
};

/// Least-squares fit of the flow-based diagram at fixed rho_m: Nelder-Mead
/// from a deterministic multi-start (p in {0.2, 0.3, 0.4}, kappa in
/// {5, 15, 30}, zeta scaled from the largest observed flow).  Out-of-bound
/// parameters are kept out by penalty.  Throws ModelError when the data
/// cannot identify the parameters (single density cluster).
FitResult fit_three_param(const AggregatedGrid& grid, double rho_m);

}  // namespace arzlab
