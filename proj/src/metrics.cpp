#include "arzlab/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "arzlab/controllers.hpp"

namespace arzlab {

double l2_deviation(const TrafficState& state, const Equilibrium& eq, double dx) {
  if (dx <= 0) throw DomainError("cell width must be positive");
  double acc = 0;
  for (size_t i = 0; i < state.rho.size(); ++i) {
    const double dr = (state.rho[i] - eq.rho_star) / eq.rho_star;
    const double dv = (state.v[i] - eq.v_star) / eq.v_star;
    acc += (dr * dr + dv * dv) * dx;
  }
  return std::sqrt(acc);
}

std::vector<double> deviation_series(const ScenarioResult& r) {
  const int nx = r.n_x(), nt = r.n_t();
  if (nx < 2) throw DomainError("trajectory needs at least two x samples");
  const double dx = r.x[1] - r.x[0];
  std::vector<double> out(nt);
  for (int it = 0; it < nt; ++it) {
    double acc = 0;
    for (int ix = 0; ix < nx; ++ix) {
      const double dr = (r.rho_at(it, ix) - r.eq.rho_star) / r.eq.rho_star;
      const double dv = (r.v_at(it, ix) - r.eq.v_star) / r.eq.v_star;
      const double w = (ix == 0 || ix == nx - 1) ? 0.5 : 1.0;
      acc += w * (dr * dr + dv * dv) * dx;
    }
    out[it] = std::sqrt(acc);
  }
  return out;
}

StateErrors state_errors(const ScenarioResult& r, const ScenarioResult& ref) {
  if (r.n_t() != ref.n_t() || r.n_x() != ref.n_x()) {
    throw DomainError("trajectories sampled on different output grids");
  }
  for (int i = 0; i < r.n_t(); ++i) {
    if (std::abs(r.t[i] - ref.t[i]) > 1e-9) {
      throw DomainError("trajectories sampled on different time grids");
    }
  }
  StateErrors e;
  const size_t n = r.rho.size();
  for (size_t k = 0; k < n; ++k) {
    const double dr = r.rho[k] - ref.rho[k];
    const double dv = r.v[k] - ref.v[k];
    e.mse_rho += (dr / ref.eq.rho_star) * (dr / ref.eq.rho_star);
    e.mse_v += (dv / ref.eq.v_star) * (dv / ref.eq.v_star);
    e.max_abs_rho = std::max(e.max_abs_rho, std::abs(dr));
    e.max_abs_v = std::max(e.max_abs_v, std::abs(dv));
    e.mean_abs_rho += std::abs(dr);
    e.mean_abs_v += std::abs(dv);
  }
  e.mse_rho /= n;
  e.mse_v /= n;
  e.mean_abs_rho /= n;
  e.mean_abs_v /= n;
  return e;
}

PerformanceIndices performance_indices(const ScenarioResult& r) {
  const int nt = r.n_t(), nx = r.n_x();
  if (nt < 3 || nx < 3) {
    throw DomainError("trajectory too coarse for acceleration estimates");
  }
  const double dt = r.t[1] - r.t[0];
  const double dx = r.x[1] - r.x[0];

  // a = v_t + v v_x: central differences inside, one-sided at the borders
  std::vector<double> a(static_cast<size_t>(nt) * nx);
  auto at = [&](int it, int ix) -> double& { return a[it * nx + ix]; };
  for (int it = 0; it < nt; ++it) {
    for (int ix = 0; ix < nx; ++ix) {
      double vt;
      if (it == 0) {
        vt = (r.v_at(1, ix) - r.v_at(0, ix)) / dt;
      } else if (it == nt - 1) {
        vt = (r.v_at(nt - 1, ix) - r.v_at(nt - 2, ix)) / dt;
      } else {
        vt = (r.v_at(it + 1, ix) - r.v_at(it - 1, ix)) / (2 * dt);
      }
      double vx;
      if (ix == 0) {
        vx = (r.v_at(it, 1) - r.v_at(it, 0)) / dx;
      } else if (ix == nx - 1) {
        vx = (r.v_at(it, nx - 1) - r.v_at(it, nx - 2)) / dx;
      } else {
        vx = (r.v_at(it, ix + 1) - r.v_at(it, ix - 1)) / (2 * dx);
      }
      at(it, ix) = vt + r.v_at(it, ix) * vx;
    }
  }

  constexpr double b0 = 2.5e-3, b1 = 2.45e-7, b2 = 1.25e-8, b3 = 9.5e-5;
  PerformanceIndices out;
  for (int it = 0; it < nt; ++it) {
    const double wt = (it == 0 || it == nt - 1) ? 0.5 : 1.0;
    for (int ix = 0; ix < nx; ++ix) {
      const double w = wt * ((ix == 0 || ix == nx - 1) ? 0.5 : 1.0) * dt * dx;
      const double v = r.v_at(it, ix);
      const double rho = r.rho_at(it, ix);
      const double acc = at(it, ix);
      double dat;
      if (it == 0) {
        dat = (at(1, ix) - at(0, ix)) / dt;
      } else if (it == nt - 1) {
        dat = (at(nt - 1, ix) - at(nt - 2, ix)) / dt;
      } else {
        dat = (at(it + 1, ix) - at(it - 1, ix)) / (2 * dt);
      }
      out.j_fuel += w * std::max(0.0, b0 + b1 * v + b2 * v * acc + b3 * acc * acc) * rho;
      out.j_comfort += w * (acc * acc + dat * dat) * rho;
      out.j_ttt += w * rho;
    }
  }
  return out;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& norm,
                   double t_begin) {
  if (t.size() != norm.size() || t.size() < 4) {
    throw DomainError("norm series too short for a decay fit");
  }
  const int n = static_cast<int>(t.size());

  DecayFit fit;
  const int tail = std::max(1, n / 10);
  double floor = 0;
  for (int i = n - tail; i < n; ++i) floor += norm[i];
  fit.floor = floor / tail;

  int i0 = 0;
  while (i0 < n - 1 && t[i0] < t_begin) ++i0;
  // fit down to the detected floor only; a later plateau is not decay
  int i1 = i0;
  while (i1 < n && norm[i1] > 2.0 * fit.floor && norm[i1] > 0) ++i1;
  if (i1 - i0 < 3) i1 = std::min(n, i0 + 3);

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int m = 0;
  for (int i = i0; i < i1; ++i) {
    if (norm[i] <= 0) break;  // log undefined: truncate the window
    const double y = std::log(norm[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    syy += y * y;
    ++m;
  }
  if (m < 3) throw DomainError("norm series hits zero too early for a fit");
  const double det = m * sxx - sx * sx;
  fit.rate = (m * sxy - sx * sy) / det;
  const double ss_res = syy - sy * sy / m - fit.rate * (sxy - sx * sy / m);
  const double ss_tot = syy - sy * sy / m;
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.t_begin = t[i0];
  fit.t_end = t[i0 + m - 1];
  return fit;
}

double timing_bench(Controller& c, const TrafficState& state,
                    const Equilibrium& eq, int reps, int groups) {
  if (reps < 1 || groups < 1) throw DomainError("bench sizes must be positive");
  using clock = std::chrono::steady_clock;
  double acc = 0;
  // warm-up evaluation outside the timed groups
  acc += c.compute(state.t, state, eq);
  std::vector<double> means(groups);
  for (int g = 0; g < groups; ++g) {
    const auto start = clock::now();
    for (int i = 0; i < reps; ++i) acc += c.compute(state.t, state, eq);
    means[g] = std::chrono::duration<double>(clock::now() - start).count() / reps;
  }
  volatile double sink = acc;  // keep the evaluations observable
  (void)sink;
  std::sort(means.begin(), means.end());
  return means[groups / 2];
}

std::string EvaluationReport::csv_header() {
  return "controller,mse_rho,mse_v,max_abs_rho_veh_km,max_abs_v_km_h,"
         "mean_abs_rho_veh_km,mean_abs_v_km_h,j_fuel,j_comfort,j_ttt,"
         "decay_rate,decay_r2,decay_floor,initial_deviation,final_deviation,"
         "eval_seconds,setup_seconds,wall_seconds";
}

std::string EvaluationReport::csv_row() const {
  char buf[640];
  std::snprintf(buf, sizeof buf,
                "%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,"
                "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g",
                controller.c_str(), errors.mse_rho, errors.mse_v,
                errors.max_abs_rho * 1000.0, errors.max_abs_v * 3.6,
                errors.mean_abs_rho * 1000.0, errors.mean_abs_v * 3.6,
                indices.j_fuel, indices.j_comfort, indices.j_ttt, decay.rate,
                decay.r_squared, decay.floor, initial_deviation,
                final_deviation, eval_seconds, setup_seconds, wall_seconds);
  return buf;
}

void write_reports_csv(const std::string& path,
                       const std::vector<EvaluationReport>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "%s\n", EvaluationReport::csv_header().c_str());
  for (const auto& r : rows) std::fprintf(f, "%s\n", r.csv_row().c_str());
  std::fclose(f);
}

}  // namespace arzlab
