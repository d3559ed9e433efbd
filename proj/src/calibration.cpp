#include "arzlab/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace arzlab {

double rho_max_from_geometry(double lanes, double vehicle_length,
                             double safety_factor) {
  if (lanes <= 0 || vehicle_length <= 0 || safety_factor <= 0) {
    throw DomainError("lane count, vehicle length and safety factor must be positive");
  }
  return lanes / (vehicle_length * safety_factor);
}

AggregatedGrid ingest_grid_csv(const std::string& path, double rho_m) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  char line[512];
  if (!std::fgets(line, sizeof line, f)) {
    std::fclose(f);
    throw IoError(path + ": empty file");
  }
  if (std::strncmp(line, "x_index,t_index,density,flow", 28) != 0) {
    std::fclose(f);
    throw IoError(path + ": expected header x_index,t_index,density,flow");
  }
  AggregatedGrid grid;
  int row = 1;
  while (std::fgets(line, sizeof line, f)) {
    ++row;
    if (line[0] == '\n' || line[0] == '\0') continue;
    AggregatedGrid::Cell c;
    double density_veh_km, flow_veh_h;
    if (std::sscanf(line, "%d,%d,%lf,%lf", &c.x_index, &c.t_index,
                    &density_veh_km, &flow_veh_h) != 4) {
      std::fclose(f);
      throw IoError(path + ": non-numeric data at row " + std::to_string(row));
    }
    c.density = density_veh_km / 1000.0;
    c.flow = flow_veh_h / 3600.0;
    if (c.density <= 0 || c.density > rho_m) {
      std::fclose(f);
      throw IoError(path + ": density out of (0, rho_m] at row " +
                    std::to_string(row));
    }
    if (c.flow < 0) {
      std::fclose(f);
      throw IoError(path + ": negative flow at row " + std::to_string(row));
    }
    grid.cells.push_back(c);
  }
  std::fclose(f);
  return grid;
}

void write_grid_csv(const std::string& path, const AggregatedGrid& grid) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "x_index,t_index,density,flow\n");
  for (const auto& c : grid.cells) {
    std::fprintf(f, "%d,%d,%.17g,%.17g\n", c.x_index, c.t_index,
                 c.density * 1000.0, c.flow * 3600.0);
  }
  std::fclose(f);
}

ThreeParamFD FitResult::diagram() const { return ThreeParamFD(zeta, kappa, p, rho_m); }

namespace {

using Point = std::array<double, 3>;  // (zeta, kappa, p)

double objective(const AggregatedGrid& grid, double rho_m, const Point& q) {
  const double zeta = q[0], kappa = q[1], p = q[2];
  // penalty walls keep the simplex in the model's valid region
  double pen = 0;
  if (zeta <= 0) pen += 1 + zeta * zeta;
  if (kappa <= 0) pen += 1 + kappa * kappa;
  if (p <= 0.01) pen += 1 + (p - 0.01) * (p - 0.01);
  if (p >= 0.99) pen += 1 + (p - 0.99) * (p - 0.99);
  if (pen > 0) return 1e6 * pen;

  const double a = std::sqrt(1 + kappa * kappa * p * p);
  const double b = std::sqrt(1 + kappa * kappa * (1 - p) * (1 - p));
  double acc = 0;
  for (const auto& c : grid.cells) {
    const double r = c.density / rho_m;
    const double model =
        zeta * (a + (b - a) * r -
                std::sqrt(1 + kappa * kappa * (r - p) * (r - p)));
    const double d = model - c.flow;
    acc += d * d;
  }
  return acc / grid.cells.size();
}

Point nelder_mead(const AggregatedGrid& grid, double rho_m, Point start,
                  int max_iter, double* best_val) {
  constexpr int dim = 3;
  std::array<Point, dim + 1> simplex;
  std::array<double, dim + 1> val;
  simplex[0] = start;
  for (int i = 0; i < dim; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] *= 1.1;
    if (simplex[i + 1][i] == 0) simplex[i + 1][i] = 0.05;
  }
  for (int i = 0; i <= dim; ++i) val[i] = objective(grid, rho_m, simplex[i]);

  auto order = [&] {
    for (int i = 0; i <= dim; ++i) {
      for (int j = i + 1; j <= dim; ++j) {
        if (val[j] < val[i]) {
          std::swap(val[i], val[j]);
          std::swap(simplex[i], simplex[j]);
        }
      }
    }
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (val[dim] - val[0] <= 1e-16 * (std::abs(val[0]) + 1e-300)) break;
    Point centroid{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      for (int d = 0; d < dim; ++d) centroid[d] += simplex[i][d] / dim;
    }
    auto along = [&](double coef) {
      Point q;
      for (int d = 0; d < dim; ++d) {
        q[d] = centroid[d] + coef * (simplex[dim][d] - centroid[d]);
      }
      return q;
    };
    const Point refl = along(-1.0);
    const double f_refl = objective(grid, rho_m, refl);
    if (f_refl < val[0]) {
      const Point exp_ = along(-2.0);
      const double f_exp = objective(grid, rho_m, exp_);
      if (f_exp < f_refl) {
        simplex[dim] = exp_;
        val[dim] = f_exp;
      } else {
        simplex[dim] = refl;
        val[dim] = f_refl;
      }
    } else if (f_refl < val[dim - 1]) {
      simplex[dim] = refl;
      val[dim] = f_refl;
    } else {
      const Point con = along(f_refl < val[dim] ? -0.5 : 0.5);
      const double f_con = objective(grid, rho_m, con);
      if (f_con < std::min(f_refl, val[dim])) {
        simplex[dim] = con;
        val[dim] = f_con;
      } else {
        for (int i = 1; i <= dim; ++i) {  // shrink toward the best vertex
          for (int d = 0; d < dim; ++d) {
            simplex[i][d] = 0.5 * (simplex[i][d] + simplex[0][d]);
          }
          val[i] = objective(grid, rho_m, simplex[i]);
        }
      }
    }
  }
  order();
  *best_val = val[0];
  return simplex[0];
}

}  // namespace

FitResult fit_three_param(const AggregatedGrid& grid, double rho_m) {
  if (rho_m <= 0) throw DomainError("rho_m must be positive");
  if (grid.cells.size() < 50) {
    throw ModelError("need at least 50 observations for a three-parameter fit");
  }
  double d_lo = grid.cells[0].density, d_hi = d_lo, q_max = 0;
  for (const auto& c : grid.cells) {
    d_lo = std::min(d_lo, c.density);
    d_hi = std::max(d_hi, c.density);
    q_max = std::max(q_max, c.flow);
  }
  if ((d_hi - d_lo) / rho_m < 0.05 || q_max <= 0) {
    throw ModelError("observations cluster at one density: fit is ill-posed");
  }

  Point best{};
  double best_val = HUGE_VAL;
  for (double zeta0 : {q_max / 8, q_max / 2, 2 * q_max}) {
    for (double kappa0 : {5.0, 15.0, 30.0}) {
      for (double p0 : {0.2, 0.3, 0.4}) {
        double v;
        const Point q = nelder_mead(grid, rho_m, {zeta0, kappa0, p0}, 600, &v);
        if (v < best_val) {
          best_val = v;
          best = q;
        }
      }
    }
  }
  // polish the winner from its own neighborhood
  double v;
  const Point q = nelder_mead(grid, rho_m, best, 600, &v);
  if (v < best_val) {
    best_val = v;
    best = q;
  }

  FitResult res;
  res.zeta = best[0];
  res.kappa = best[1];
  res.p = best[2];
  res.rho_m = rho_m;
  res.rmse = std::sqrt(best_val);
  return res;
}

}  // namespace arzlab
