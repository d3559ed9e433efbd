#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "arzlab/calibration.hpp"

using namespace arzlab;
namespace fs = std::filesystem;

namespace {

AggregatedGrid synthetic_grid(const ThreeParamFD& truth, double rho_m,
                              double noise_frac, uint64_t seed, int n = 300) {
  AggregatedGrid g;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_frac);
  for (int i = 0; i < n; ++i) {
    AggregatedGrid::Cell c;
    c.x_index = i % 25;
    c.t_index = i / 25;
    c.density = rho_m * (0.02 + 0.96 * i / (n - 1.0));
    c.flow = truth.flow_raw(c.density) * (1.0 + noise(rng));
    if (c.flow < 0) c.flow = 0;
    g.cells.push_back(c);
  }
  return g;
}

}  // namespace

TEST_CASE("jam density from road geometry") {
  CHECK(rho_max_from_geometry(6, 5, 1.5) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rho_max_from_geometry(1, 5, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rho_max_from_geometry(3, 5, 1.0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_THROWS_AS(rho_max_from_geometry(0, 5, 1.0), DomainError);
}

TEST_CASE("grid CSV round trip in field units") {
  const ThreeParamFD truth(1339.38 / 3600.0, 16.53, 0.28, 0.8);
  const AggregatedGrid g = synthetic_grid(truth, 0.8, 0.0, 1, 60);
  const auto path = (fs::temp_directory_path() / "arzlab_grid_rt.csv").string();
  write_grid_csv(path, g);
  const AggregatedGrid g2 = ingest_grid_csv(path, 0.8);
  REQUIRE(g2.cells.size() == g.cells.size());
  for (size_t i = 0; i < g.cells.size(); ++i) {
    CHECK(g2.cells[i].x_index == g.cells[i].x_index);
    CHECK(g2.cells[i].t_index == g.cells[i].t_index);
    CHECK(g2.cells[i].density ==
          doctest::Approx(g.cells[i].density).epsilon(1e-9));
    CHECK(g2.cells[i].flow == doctest::Approx(g.cells[i].flow).epsilon(1e-9));
  }
  fs::remove(path);
}

TEST_CASE("malformed observation files are rejected with the row number") {
  const auto path = (fs::temp_directory_path() / "arzlab_grid_bad.csv").string();
  {
    std::ofstream f(path);
    f << "x_index,t_index,density,flow\n0,0,100,1200\n1,0,abc,900\n";
  }
  try {
    ingest_grid_csv(path, 0.8);
    FAIL("expected a parse error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);  // file row 3
  }
  {
    std::ofstream f(path);
    f << "x_index,t_index,density\n0,0,100\n";
  }
  CHECK_THROWS_AS(ingest_grid_csv(path, 0.8), IoError);
  {
    std::ofstream f(path);
    f << "x_index,t_index,density,flow\n0,0,900,1200\n";  // above jam density
  }
  CHECK_THROWS_AS(ingest_grid_csv(path, 0.8), IoError);
  fs::remove(path);
}

TEST_CASE("noiseless synthetic data is recovered almost exactly") {
  const double rho_m = 0.8;
  const ThreeParamFD truth(1339.38 / 3600.0, 16.53, 0.28, rho_m);
  const FitResult fit = fit_three_param(synthetic_grid(truth, rho_m, 0.0, 1), rho_m);
  CHECK(fit.zeta == doctest::Approx(truth.zeta()).epsilon(1e-6));
  CHECK(fit.kappa == doctest::Approx(truth.kappa()).epsilon(1e-6));
  CHECK(fit.p == doctest::Approx(truth.p()).epsilon(1e-6));
  CHECK(fit.rmse < 1e-8);
}

TEST_CASE("one percent noise keeps the parameters within two percent") {
  const double rho_m = 0.8;
  const ThreeParamFD truth(1339.38 / 3600.0, 16.53, 0.28, rho_m);
  const FitResult fit =
      fit_three_param(synthetic_grid(truth, rho_m, 0.01, 21), rho_m);
  CHECK(std::abs(fit.zeta - truth.zeta()) / truth.zeta() < 0.02);
  CHECK(std::abs(fit.kappa - truth.kappa()) / truth.kappa() < 0.02);
  CHECK(std::abs(fit.p - truth.p()) / truth.p() < 0.02);
}

TEST_CASE("the reference parameter set puts the congested speed near 22.3 km/h") {
  const ThreeParamFD fd(1339.38 / 3600.0, 16.53, 0.28, 0.8);
  const double v = fd.velocity(0.320) * 3.6;
  CHECK(v == doctest::Approx(22.3).epsilon(0.02));
}

TEST_CASE("the fitted diagram is admissible") {
  const double rho_m = 0.8;
  const ThreeParamFD truth(1339.38 / 3600.0, 16.53, 0.28, rho_m);
  const FitResult fit =
      fit_three_param(synthetic_grid(truth, rho_m, 0.01, 7), rho_m);
  const ThreeParamFD fd = fit.diagram();
  CHECK(fd.flow_raw(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fd.flow_is_concave());
  CHECK(fd.rho_max() == rho_m);
}

TEST_CASE("unidentifiable data is refused") {
  const double rho_m = 0.8;
  const ThreeParamFD truth(1339.38 / 3600.0, 16.53, 0.28, rho_m);
  // too few observations
  CHECK_THROWS_AS(
      fit_three_param(synthetic_grid(truth, rho_m, 0.0, 1, 30), rho_m),
      ModelError);
  // a single density cluster
  AggregatedGrid g;
  for (int i = 0; i < 100; ++i) {
    AggregatedGrid::Cell c;
    c.x_index = i;
    c.density = 0.3 + 1e-5 * i;
    c.flow = truth.flow_raw(c.density);
    g.cells.push_back(c);
  }
  CHECK_THROWS_AS(fit_three_param(g, rho_m), ModelError);
}
