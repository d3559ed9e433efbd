#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "arzlab/controllers.hpp"
#include "arzlab/metrics.hpp"
#include "arzlab/presets.hpp"
#include "arzlab/svg.hpp"

using namespace arzlab;

namespace {

Equilibrium bench_eq() {
  const GreenshieldsFD fd(40.0, 0.16, 1.0);
  return equilibrium_from_density(fd, 0.12);
}

/// constant-in-space-and-time trajectory on a (nt x nx) output grid
ScenarioResult constant_result(double rho, double v, int nt = 31, int nx = 21,
                               double T = 300, double L = 500) {
  ScenarioResult r;
  r.eq = bench_eq();
  r.t.resize(nt);
  r.x.resize(nx);
  for (int i = 0; i < nt; ++i) r.t[i] = T * i / (nt - 1);
  for (int j = 0; j < nx; ++j) r.x[j] = L * j / (nx - 1);
  r.rho.assign(nt * nx, rho);
  r.v.assign(nt * nx, v);
  r.u.assign(nt, 0.0);
  return r;
}

}  // namespace

TEST_CASE("deviation norm closed forms") {
  const Equilibrium eq = bench_eq();
  const double L = 500, dx = L / 200;
  TrafficState st;
  st.rho.assign(200, eq.rho_star);
  st.v.assign(200, eq.v_star);
  CHECK(l2_deviation(st, eq, dx) == doctest::Approx(0.0));

  // a constant 10% density offset: norm = 0.1 sqrt(L)
  TrafficState st2 = st;
  for (auto& r : st2.rho) r = 1.1 * eq.rho_star;
  CHECK(l2_deviation(st2, eq, dx) ==
        doctest::Approx(0.1 * std::sqrt(L)).epsilon(1e-12));

  // doubling both deviations doubles the norm
  TrafficState st3 = st;
  for (auto& r : st3.rho) r = 1.2 * eq.rho_star;
  CHECK(l2_deviation(st3, eq, dx) ==
        doctest::Approx(2 * l2_deviation(st2, eq, dx)).epsilon(1e-12));
}

TEST_CASE("deviation series of a constant trajectory") {
  const Equilibrium eq = bench_eq();
  const ScenarioResult r = constant_result(1.1 * eq.rho_star, eq.v_star);
  const auto dev = deviation_series(r);
  REQUIRE(dev.size() == r.t.size());
  for (double d : dev) {
    CHECK(d == doctest::Approx(0.1 * std::sqrt(500.0)).epsilon(1e-12));
  }
}

TEST_CASE("state error closed forms and grid checks") {
  const Equilibrium eq = bench_eq();
  const ScenarioResult a = constant_result(eq.rho_star, eq.v_star);
  const StateErrors zero = state_errors(a, a);
  CHECK(zero.mse_rho == 0.0);
  CHECK(zero.max_abs_v == 0.0);

  ScenarioResult b = a;
  const double drho = 0.01 * eq.rho_star, dv = 0.02 * eq.v_star;
  for (auto& r : b.rho) r += drho;
  for (auto& v : b.v) v += dv;
  const StateErrors e = state_errors(b, a);
  CHECK(e.mse_rho == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(e.mse_v == doctest::Approx(4e-4).epsilon(1e-12));
  CHECK(e.max_abs_rho == doctest::Approx(drho).epsilon(1e-12));
  CHECK(e.mean_abs_v == doctest::Approx(dv).epsilon(1e-12));

  ScenarioResult c = constant_result(eq.rho_star, eq.v_star, 30);
  CHECK_THROWS_AS(state_errors(c, a), DomainError);
}

TEST_CASE("stationary performance indices reduce to closed forms") {
  const Equilibrium eq = bench_eq();
  const double rho = eq.rho_star, v = eq.v_star, L = 500, T = 300;
  const ScenarioResult r = constant_result(rho, v);
  const PerformanceIndices pi = performance_indices(r);
  // zero acceleration: fuel rate is max(0, b0 + b1 v) per vehicle
  const double rate = 2.5e-3 + 2.45e-7 * v;
  CHECK(pi.j_fuel == doctest::Approx(rate * rho * L * T).epsilon(1e-12));
  CHECK(pi.j_comfort == doctest::Approx(0.0));
  CHECK(pi.j_ttt == doctest::Approx(rho * L * T).epsilon(1e-12));
}

TEST_CASE("total travel time equals the trapezoid double sum") {
  const Equilibrium eq = bench_eq();
  ScenarioResult r = constant_result(eq.rho_star, eq.v_star, 11, 7, 100, 500);
  // make the density field non-trivial but deterministic
  for (int i = 0; i < r.n_t(); ++i) {
    for (int j = 0; j < r.n_x(); ++j) {
      r.rho[i * r.n_x() + j] =
          eq.rho_star * (1 + 0.1 * std::sin(0.7 * i) * std::cos(1.3 * j));
    }
  }
  double expect = 0;
  const double dt = r.t[1] - r.t[0], dx = r.x[1] - r.x[0];
  for (int i = 0; i < r.n_t(); ++i) {
    const double wt = (i == 0 || i == r.n_t() - 1) ? 0.5 : 1.0;
    for (int j = 0; j < r.n_x(); ++j) {
      const double wx = (j == 0 || j == r.n_x() - 1) ? 0.5 : 1.0;
      expect += wt * wx * r.rho_at(i, j) * dt * dx;
    }
  }
  CHECK(performance_indices(r).j_ttt == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("decay fit recovers a synthetic exponential rate") {
  std::vector<double> t(301), norm(301);
  for (int i = 0; i <= 300; ++i) {
    t[i] = i;
    norm[i] = 5.0 * std::exp(-0.05 * i);
  }
  const DecayFit fit = decay_fit(t, norm);
  CHECK(fit.rate == doctest::Approx(-0.05).epsilon(1e-6));
  CHECK(fit.r_squared > 1.0 - 1e-9);
  CHECK(fit.floor < 1e-4);
}

TEST_CASE("decay fit needs enough points") {
  CHECK_THROWS_AS(decay_fit({0.0, 1.0}, {1.0, 0.5}), DomainError);
}

TEST_CASE("degenerate trajectories are rejected by the indices") {
  const Equilibrium eq = bench_eq();
  const ScenarioResult tiny = constant_result(eq.rho_star, eq.v_star, 2, 2);
  CHECK_THROWS_AS(performance_indices(tiny), DomainError);
}

TEST_CASE("per-evaluation timing is positive, repeatable, and ranks sanely") {
  const Scenario s = make_preset("paper_4_1", 3200);
  const KernelField kf = solve_kernels(s.cfg.eq, s.cfg.tau, 500.0, 101);
  BacksteppingController bs(kf, s.cfg.eq);
  PIController pi;
  const TrafficState st = s.initial();
  const double t_bs = timing_bench(bs, st, s.cfg.eq, 100, 5);
  const double t_pi = timing_bench(pi, st, s.cfg.eq, 100, 5);
  CHECK(t_bs > 0);
  CHECK(t_pi > 0);
  // the integral law walks 3200 cells; PI reads two boundary values
  CHECK(t_bs > 5 * t_pi);
  const double t_bs2 = timing_bench(bs, st, s.cfg.eq, 100, 5);
  CHECK(t_bs2 < 10 * t_bs);
  CHECK(t_bs < 10 * t_bs2);
}

TEST_CASE("heatmap export writes a well-formed document") {
  const Equilibrium eq = bench_eq();
  const ScenarioResult r = constant_result(eq.rho_star, eq.v_star, 11, 7);
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "arzlab_hm.svg").string();
  write_heatmap_svg(path, r, "rho");
  std::ifstream in(path);
  std::string body((std::istreambuf_iterator<char>(in)), {});
  const bool has_open_tag = body.find("<svg") != std::string::npos;
  CHECK(has_open_tag);
  CHECK(body.find("</svg>") != std::string::npos);
  CHECK(body.find("veh/km") != std::string::npos);
  CHECK_THROWS_AS(write_heatmap_svg(path, r, "momentum"), DomainError);
  fs::remove(path);
}

TEST_CASE("evaluation report CSV emits one row per controller") {
  EvaluationReport r;
  r.controller = "demo";
  r.initial_deviation = 2.0;
  r.final_deviation = 0.5;
  const std::string header = EvaluationReport::csv_header();
  const std::string row = r.csv_row();
  CHECK(header.find("controller") != std::string::npos);
  CHECK(row.find("demo") != std::string::npos);
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
}
