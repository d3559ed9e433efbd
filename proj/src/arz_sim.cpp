#include "arzlab/arz_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "arzlab/controllers.hpp"
#include "arzlab/units.hpp"

namespace arzlab {

Grid1D::Grid1D(double length_, int n_cells_) : length(length_), n_cells(n_cells_) {
  if (!(length > 0.0)) throw DomainError("grid length must be positive");
  if (n_cells < 8) throw DomainError("grid needs at least 8 cells");
  dx = length / n_cells;
}

void SimConfig::validate() const {
  if (!fd) throw DomainError("simulation config lacks a fundamental diagram");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  if (!(cfl > 0.0 && cfl <= 0.9)) throw DomainError("CFL number must be in (0, 0.9]");
  if (!(tau > 0.0)) throw DomainError("relaxation time must be positive");
  if (grid.n_cells < 8) throw DomainError("grid needs at least 8 cells");
}

TrafficState make_initial(const std::function<double(double)>& rho_profile,
                          const std::function<double(double)>& v_profile,
                          const Grid1D& grid, double rho_max) {
  TrafficState s;
  s.rho.resize(grid.n_cells);
  s.v.resize(grid.n_cells);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    s.rho[i] = rho_profile(x);
    s.v[i] = v_profile(x);
    if (!(s.rho[i] > 0.0 && s.rho[i] <= rho_max)) {
      throw DomainError("initial density out of (0, rho_max] at x=" +
                        std::to_string(x));
    }
    if (!(s.v[i] > 0.0)) {
      throw DomainError("initial speed not positive at x=" + std::to_string(x));
    }
  }
  return s;
}

TrafficState make_initial(InitialKind kind, const Equilibrium& eq,
                          const Grid1D& grid, double rho_max) {
  const double L = grid.length;
  switch (kind) {
    case InitialKind::Sinusoidal3Pi:
      return make_initial(
          [&](double x) { return eq.rho_star * (1.0 + 0.1 * std::sin(3 * M_PI * x / L)); },
          [&](double x) { return eq.v_star * (1.0 - 0.1 * std::sin(3 * M_PI * x / L)); },
          grid, rho_max);
    case InitialKind::SinusoidalPi:
      return make_initial(
          [&](double x) {
            const double q = eq.q_star * (1.0 + 0.05 * std::sin(M_PI * x / L));
            const double v = eq.v_star * (1.0 - 0.05 * std::sin(M_PI * x / L));
            return q / v;
          },
          [&](double x) { return eq.v_star * (1.0 - 0.05 * std::sin(M_PI * x / L)); },
          grid, rho_max);
    case InitialKind::Linear:
      return make_initial(
          [&](double x) {
            const double q = eq.q_star * (1.0 - 0.05 * x / L);
            const double v = eq.v_star * (1.0 - 0.1 * x / L);
            return q / v;
          },
          [&](double x) { return eq.v_star * (1.0 - 0.1 * x / L); }, grid, rho_max);
    case InitialKind::ConstantEquilibrium:
      return make_initial([&](double) { return eq.rho_star; },
                          [&](double) { return eq.v_star; }, grid, rho_max);
  }
  throw DomainError("unknown initial-condition kind");
}

namespace {

struct Cons {
  double rho;
  double y;  // rho (v - V(rho))
};

struct Flux {
  double f_rho;
  double f_y;
};

inline Flux physical_flux(const Cons& u, double v) {
  return {u.rho * v, u.y * v};
}

// HLL flux with Davis-type wave-speed estimates from the two ARZ
// characteristic speeds v + rho V'(rho) and v of each side.
inline Flux hll(const Cons& ul, double vl, double cl, const Cons& ur, double vr,
                double cr) {
  const double sl = std::min(vl + cl, vr + cr);
  const double sr = std::max(vl, vr);
  const Flux fl = physical_flux(ul, vl);
  const Flux fr = physical_flux(ur, vr);
  if (sl >= 0.0) return fl;
  if (sr <= 0.0) return fr;
  const double inv = 1.0 / (sr - sl);
  return {(sr * fl.f_rho - sl * fr.f_rho + sl * sr * (ur.rho - ul.rho)) * inv,
          (sr * fl.f_y - sl * fr.f_y + sl * sr * (ur.y - ul.y)) * inv};
}

}  // namespace

StepInfo step(TrafficState& state, const SimConfig& cfg, double u) {
  const int n = cfg.grid.n_cells;
  const double dx = cfg.grid.dx;
  const FundamentalDiagram& fd = *cfg.fd;

  // extended arrays with one ghost cell per side realizing the boundary
  // conditions: inlet carries the prescribed flow q*, outlet the actuated
  // speed q(L,t)/rho* + u
  static thread_local std::vector<double> rho_e, v_e, y_e, c_e;
  rho_e.resize(n + 2);
  v_e.resize(n + 2);
  y_e.resize(n + 2);
  c_e.resize(n + 2);

  for (int i = 0; i < n; ++i) {
    rho_e[i + 1] = state.rho[i];
    v_e[i + 1] = state.v[i];
  }
  v_e[0] = v_e[1];
  rho_e[0] = cfg.eq.q_star / v_e[0];
  rho_e[n + 1] = rho_e[n];
  v_e[n + 1] = rho_e[n] * v_e[n] / cfg.eq.rho_star + u;
  if (!(v_e[n + 1] > 0.0)) {
    throw NumericalError("actuated outlet speed became non-positive", state.t);
  }

  double smax = 0.0;
  for (int i = 0; i < n + 2; ++i) {
    y_e[i] = rho_e[i] * (v_e[i] - fd.velocity_raw(rho_e[i]));
    c_e[i] = rho_e[i] * fd.velocity_derivative_raw(rho_e[i]);
    smax = std::max(smax, std::max(std::abs(v_e[i]), std::abs(v_e[i] + c_e[i])));
  }
  if (!(smax > 0.0) || !std::isfinite(smax)) {
    throw NumericalError("characteristic speeds degenerate", state.t);
  }
  const double dt = cfg.cfl * dx / smax;

  static thread_local std::vector<Flux> flux;
  flux.resize(n + 1);
  for (int f = 0; f <= n; ++f) {
    const Cons ul{rho_e[f], y_e[f]};
    const Cons ur{rho_e[f + 1], y_e[f + 1]};
    flux[f] = hll(ul, v_e[f], c_e[f], ur, v_e[f + 1], c_e[f + 1]);
  }

  const double relax = std::exp(-dt / cfg.tau);
  const double r = dt / dx;
  for (int i = 0; i < n; ++i) {
    const double rho = rho_e[i + 1] - r * (flux[i + 1].f_rho - flux[i].f_rho);
    const double y = (y_e[i + 1] - r * (flux[i + 1].f_y - flux[i].f_y)) * relax;
    if (!(rho > 0.0) || !std::isfinite(rho) || !std::isfinite(y)) {
      throw NumericalError("density blow-up in cell " + std::to_string(i), state.t);
    }
    if (rho > fd.rho_max()) {
      throw NumericalError("density exceeded rho_max in cell " + std::to_string(i),
                           state.t);
    }
    state.rho[i] = rho;
    state.v[i] = fd.velocity_raw(rho) + y / rho;
    if (!(state.v[i] > 0.0)) {
      throw NumericalError("speed became non-positive in cell " + std::to_string(i),
                           state.t);
    }
  }
  state.t += dt;
  return {dt, flux[0].f_rho * dt, flux[n].f_rho * dt};
}

namespace {

// linear interpolation of cell-center samples with constant end extension
double sample_cells(const std::vector<double>& f, const Grid1D& g, double x) {
  const double s = x / g.dx - 0.5;
  if (s <= 0.0) return f.front();
  if (s >= g.n_cells - 1) return f.back();
  const int i = static_cast<int>(s);
  const double a = s - i;
  return (1 - a) * f[i] + a * f[i + 1];
}

}  // namespace

ScenarioResult run_closed_loop(const TrafficState& ic, const SimConfig& cfg,
                               Controller& controller) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  ScenarioResult res;
  res.eq = cfg.eq;
  res.t.resize(cfg.n_out_t);
  res.x.resize(cfg.n_out_x);
  for (int k = 0; k < cfg.n_out_t; ++k) {
    res.t[k] = cfg.horizon * k / (cfg.n_out_t - 1);
  }
  for (int j = 0; j < cfg.n_out_x; ++j) {
    res.x[j] = cfg.grid.length * j / (cfg.n_out_x - 1);
  }
  res.rho.resize(static_cast<size_t>(cfg.n_out_t) * cfg.n_out_x);
  res.v.resize(res.rho.size());
  res.u.resize(cfg.n_out_t);

  auto record = [&](int k, const TrafficState& s, double u) {
    for (int j = 0; j < cfg.n_out_x; ++j) {
      res.rho[static_cast<size_t>(k) * cfg.n_out_x + j] =
          sample_cells(s.rho, cfg.grid, res.x[j]);
      res.v[static_cast<size_t>(k) * cfg.n_out_x + j] =
          sample_cells(s.v, cfg.grid, res.x[j]);
    }
    res.u[k] = u;
  };

  controller.reset();
  TrafficState state = ic;
  state.t = 0.0;
  TrafficState prev = state;
  double u = controller.compute(state.t, state, cfg.eq);
  record(0, state, u);
  int k = 1;
  double prev_u = u;
  while (k < cfg.n_out_t) {
    prev = state;
    prev_u = u;
    step(state, cfg, u);
    ++res.n_steps;
    while (k < cfg.n_out_t && state.t >= res.t[k]) {
      // nearest internal step to the output time
      if (res.t[k] - prev.t <= state.t - res.t[k]) {
        record(k, prev, prev_u);
      } else {
        record(k, state, u);
      }
      ++k;
    }
    if (k < cfg.n_out_t) u = controller.compute(state.t, state, cfg.eq);
  }

  res.warnings = controller.take_warnings();
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

void ScenarioResult::write_csv(const std::string& path) const {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path + " for writing");
  std::fprintf(fp, "#units t=s x=m rho=veh/km v=km/h u=km/h\n");
  std::fprintf(fp, "t,x,rho,v,u\n");
  for (int it = 0; it < n_t(); ++it) {
    for (int ix = 0; ix < n_x(); ++ix) {
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t[it], x[ix],
                   units::vehm_to_vehkm(rho_at(it, ix)),
                   units::mps_to_kmh(v_at(it, ix)), units::mps_to_kmh(u[it]));
    }
  }
  std::fclose(fp);
}

ScenarioResult ScenarioResult::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#units", 0) != 0) {
    throw IoError(path + ": missing #units header");
  }
  if (!std::getline(in, line) || line != "t,x,rho,v,u") {
    throw IoError(path + ": missing t,x,rho,v,u header");
  }
  ScenarioResult res;
  std::vector<double> rows[5];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double c[5];
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg", &c[0], &c[1], &c[2],
                    &c[3], &c[4]) != 5) {
      throw IoError(path + ": malformed row: " + line);
    }
    for (int j = 0; j < 5; ++j) rows[j].push_back(c[j]);
  }
  if (rows[0].empty()) throw IoError(path + ": no data rows");
  // x grid repeats within each time block
  size_t nx = 1;
  while (nx < rows[0].size() && rows[0][nx] == rows[0][0]) ++nx;
  if (rows[0].size() % nx != 0) throw IoError(path + ": ragged sample grid");
  const size_t nt = rows[0].size() / nx;
  res.x.assign(rows[1].begin(), rows[1].begin() + nx);
  res.t.resize(nt);
  res.u.resize(nt);
  res.rho.resize(nt * nx);
  res.v.resize(nt * nx);
  for (size_t it = 0; it < nt; ++it) {
    res.t[it] = rows[0][it * nx];
    res.u[it] = units::kmh_to_mps(rows[4][it * nx]);
    for (size_t ix = 0; ix < nx; ++ix) {
      res.rho[it * nx + ix] = units::vehkm_to_vehm(rows[2][it * nx + ix]);
      res.v[it * nx + ix] = units::kmh_to_mps(rows[3][it * nx + ix]);
    }
  }
  return res;
}

}  // namespace arzlab
