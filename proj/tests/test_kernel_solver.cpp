#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "arzlab/kernel_solver.hpp"

using namespace arzlab;

namespace {

Equilibrium benchmark_eq() {
  const GreenshieldsFD fd(40.0, 0.16, 1.0);
  return equilibrium_from_density(fd, 0.12);
}

}  // namespace

TEST_CASE("kernel value at the origin matches the closed form") {
  // K^w(x, x) = -c(x)/(lambda1 + lambda2); at x = 0 this is (1/tau)/30
  const KernelField kf = solve_kernels(benchmark_eq(), 60.0, 500.0, 101);
  CHECK(kf.kw(0, 0) == doctest::Approx(1.0 / 1800.0).epsilon(1e-12));
}

TEST_CASE("second kernel is constant along its characteristics") {
  const KernelField kf = solve_kernels(benchmark_eq(), 60.0, 500.0, 81);
  for (int i = 2; i < 81; ++i) {
    for (int j = 1; j <= i - 1; ++j) {
      CHECK(kf.kv(i, j) == doctest::Approx(kf.kv(i - 1, j - 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary conditions are exact at the nodes") {
  const KernelField kf = solve_kernels(benchmark_eq(), 60.0, 500.0, 101);
  const KernelResiduals res = kernel_residuals(kf);
  CHECK(res.max_boundary() < 1e-14);
  for (int i = 0; i < 101; ++i) {
    CHECK(kf.kv(i, 0) == doctest::Approx(-kf.kw(i, 0)).epsilon(1e-14));
    CHECK(kf.kw(i, i) ==
          doctest::Approx(-kf.c(kf.grid().node(i)) /
                          (kf.lambda1() + kf.lambda2())).epsilon(1e-14));
  }
}

TEST_CASE("interior residual at least halves from n=51 to n=101") {
  const Equilibrium eq = benchmark_eq();
  const double r51 =
      kernel_residuals(solve_kernels(eq, 60.0, 500.0, 51)).max_interior();
  const double r101 =
      kernel_residuals(solve_kernels(eq, 60.0, 500.0, 101)).max_interior();
  CHECK(r101 < 0.5 * r51);
}

TEST_CASE("residual evaluation flags a wrong kernel field") {
  // the zero field violates the diagonal condition everywhere except x where
  // c(x) ~ 0, so the boundary defect must be visible
  const Equilibrium eq = benchmark_eq();
  KernelField zero(TriangularGrid(41, 500.0), eq.lambda1, eq.lambda2, 60.0);
  const KernelResiduals res = kernel_residuals(zero);
  CHECK(res.max_boundary() > 1e-4);
}

TEST_CASE("wave-speed ratio of the benchmark point") {
  const Equilibrium eq = benchmark_eq();
  CHECK(eq.lambda2 / eq.lambda1 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interpolation reproduces nodes and rejects outside queries") {
  const KernelField kf = solve_kernels(benchmark_eq(), 60.0, 500.0, 51);
  const TriangularGrid& g = kf.grid();
  for (int i = 0; i < g.n; i += 7) {
    for (int j = 0; j <= i; j += 5) {
      CHECK(kf.kw_interp(g.node(i), g.node(j)) ==
            doctest::Approx(kf.kw(i, j)).epsilon(1e-12));
      CHECK(kf.kv_interp(g.node(i), g.node(j)) ==
            doctest::Approx(kf.kv(i, j)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(kf.kw_interp(100.0, 200.0), DomainError);  // xi > x
  CHECK_THROWS_AS(kf.kw_interp(600.0, 0.0), DomainError);
}

TEST_CASE("edge traces match the stored values") {
  const KernelField kf = solve_kernels(benchmark_eq(), 60.0, 500.0, 61);
  const auto kw = kf.kw_edge();
  const auto kv = kf.kv_edge();
  REQUIRE(kw.size() == 61);
  for (int j = 0; j < 61; ++j) {
    CHECK(kw[j] == kf.kw(60, j));
    CHECK(kv[j] == kf.kv(60, j));
  }
}

TEST_CASE("control gain boundary coefficients") {
  const Equilibrium eq = benchmark_eq();
  const KernelField kf = solve_kernels(eq, 60.0, 500.0, 101);
  std::vector<double> xi(11);
  for (int i = 0; i < 11; ++i) xi[i] = 50.0 * i;
  const ControlGains g = control_gains_original(kf, eq, 60.0, xi);
  CHECK(g.c_q == doctest::Approx(-1.0));
  // rho* + v*/V'(rho*) = 0.12 - 10/250
  CHECK(g.c_v == doctest::Approx(0.08).epsilon(1e-12));
  REQUIRE(g.xi.size() == 11);
  REQUIRE(g.w_q.size() == 11);
  REQUIRE(g.w_v.size() == 11);
}

TEST_CASE("kernel CSV round trip") {
  const KernelField kf = solve_kernels(benchmark_eq(), 60.0, 500.0, 41);
  const auto path =
      (std::filesystem::temp_directory_path() / "arzlab_kernel_rt.csv").string();
  kf.write_csv(path);
  const KernelField kf2 = KernelField::read_csv(path);
  REQUIRE(kf2.grid().n == 41);
  CHECK(kf2.lambda1() == doctest::Approx(kf.lambda1()).epsilon(1e-12));
  CHECK(kf2.lambda2() == doctest::Approx(kf.lambda2()).epsilon(1e-12));
  for (int i = 0; i < 41; ++i) {
    for (int j = 0; j <= i; ++j) {
      CHECK(kf2.kw(i, j) == doctest::Approx(kf.kw(i, j)).epsilon(1e-12));
      CHECK(kf2.kv(i, j) == doctest::Approx(kf.kv(i, j)).epsilon(1e-12));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("degenerate grids are rejected") {
  CHECK_THROWS_AS(solve_kernels(benchmark_eq(), 60.0, 500.0, 1), DomainError);
  CHECK_THROWS_AS(TriangularGrid(2, -1.0), DomainError);
}
