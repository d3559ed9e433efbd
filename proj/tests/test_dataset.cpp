#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "arzlab/dataset.hpp"

using namespace arzlab;
namespace fs = std::filesystem;

namespace {

const GreenshieldsFD& bench_fd() {
  static const GreenshieldsFD fd(40.0, 0.16, 1.0);
  return fd;
}

fs::path tmp_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "arzlab_ds_tests" / leaf;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

KernelGenConfig small_kernel_cfg() {
  KernelGenConfig cfg;
  cfg.n_samples = 20;
  cfg.grid_n = 41;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("kernel corpus regeneration is byte-identical and jobs-independent") {
  KernelGenConfig cfg = small_kernel_cfg();
  const fs::path a = tmp_dir("ka"), b = tmp_dir("kb");
  cfg.jobs = 1;
  const DatasetManifest ma = gen_kernel_dataset(bench_fd(), cfg, a.string());
  cfg.jobs = 4;
  const DatasetManifest mb = gen_kernel_dataset(bench_fd(), cfg, b.string());
  REQUIRE(ma.samples.size() == mb.samples.size());
  CHECK(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"));
  for (const auto& s : ma.samples) {
    CHECK(slurp(a / s.file) == slurp(b / s.file));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sampled wave speeds stay inside the configured band") {
  KernelGenConfig cfg = small_kernel_cfg();
  const fs::path d = tmp_dir("band");
  const DatasetManifest m = gen_kernel_dataset(bench_fd(), cfg, d.string());
  for (const auto& s : m.samples) {
    CHECK(s.lambda2 * 3.6 >= 18.0 - 1e-9);
    CHECK(s.lambda2 * 3.6 <= 90.0 + 1e-9);
    CHECK(s.rho_star >= cfg.rho_lo);
    CHECK(s.rho_star <= cfg.rho_hi);
  }
  fs::remove_all(d);
}

TEST_CASE("direct wave-speed sampling spans the same band uniformly") {
  KernelGenConfig cfg = small_kernel_cfg();
  cfg.uniform_lambda2 = true;
  cfg.n_samples = 40;
  const fs::path d = tmp_dir("uniform");
  const DatasetManifest m = gen_kernel_dataset(bench_fd(), cfg, d.string());
  for (const auto& s : m.samples) {
    // the recorded rho* must reproduce the recorded lambda2
    const Equilibrium eq = equilibrium_from_density(bench_fd(), s.rho_star);
    CHECK(eq.lambda2 == doctest::Approx(s.lambda2).epsilon(1e-6));
  }
  fs::remove_all(d);
}

TEST_CASE("train/test split is deterministic 9:1") {
  const fs::path d = tmp_dir("split");
  const DatasetManifest m =
      gen_kernel_dataset(bench_fd(), small_kernel_cfg(), d.string());
  CHECK(m.n_train() == 18);
  CHECK(m.n_test() == 2);
  for (size_t i = 0; i < m.samples.size(); ++i) {
    CHECK(m.samples[i].split == (i % 10 == 9 ? "test" : "train"));
  }
  fs::remove_all(d);
}

TEST_CASE("manifest round trip preserves every record") {
  const fs::path d = tmp_dir("rt");
  const DatasetManifest m =
      gen_kernel_dataset(bench_fd(), small_kernel_cfg(), d.string());
  const DatasetManifest m2 = DatasetManifest::read((d / "manifest.jsonl").string());
  CHECK(m2.kind == m.kind);
  CHECK(m2.config_hash == m.config_hash);
  REQUIRE(m2.samples.size() == m.samples.size());
  for (size_t i = 0; i < m.samples.size(); ++i) {
    CHECK(m2.samples[i].file == m.samples[i].file);
    CHECK(m2.samples[i].split == m.samples[i].split);
    CHECK(m2.samples[i].rho_star == doctest::Approx(m.samples[i].rho_star).epsilon(1e-15));
    CHECK(m2.samples[i].lambda2 == doctest::Approx(m.samples[i].lambda2).epsilon(1e-15));
  }
  fs::remove_all(d);
}

TEST_CASE("kernel corpus loads onto the strided triangle nodes") {
  const fs::path d = tmp_dir("load");
  const DatasetManifest m =
      gen_kernel_dataset(bench_fd(), small_kernel_cfg(), d.string());
  const OperatorDataset ds = load_kernel_dataset(m, 2);
  // n = 41, stride 2: 21 kept rows with 1..21 kept nodes = 231 queries
  CHECK(ds.q() == 231);
  CHECK(ds.heads() == 2);
  CHECK(ds.u.size() == 20);
  CHECK(ds.train_idx.size() == 18);
  CHECK(ds.test_idx.size() == 2);
  // loaded targets agree with a fresh solve
  const Equilibrium eq =
      equilibrium_from_density(bench_fd(), m.samples[0].rho_star);
  const KernelField kf = solve_kernels(eq, 60.0, 500.0, 41);
  int k = 0;
  for (int i = 0; i < 41; i += 2) {
    for (int j = 0; j <= i; j += 2) {
      CHECK(ds.targets[0](0, k) == doctest::Approx(kf.kw(i, j)).epsilon(1e-9));
      CHECK(ds.targets[0](1, k) == doctest::Approx(kf.kv(i, j)).epsilon(1e-9));
      ++k;
    }
  }
  fs::remove_all(d);
}

TEST_CASE("an equilibrium start yields a silent control corpus") {
  ControlGenConfig cfg;
  cfg.n_samples = 3;
  cfg.n_cells = 100;
  cfg.horizon = 60;
  cfg.n_out_t = 61;
  cfg.ic = InitialKind::ConstantEquilibrium;
  cfg.seed = 5;
  const fs::path d = tmp_dir("silent");
  const DatasetManifest m = gen_control_dataset(bench_fd(), cfg, d.string());
  const OperatorDataset ds = load_control_dataset(m);
  CHECK(ds.heads() == 1);
  CHECK(ds.q() == 61);
  for (const auto& t : ds.targets) {
    CHECK(t.cwiseAbs().maxCoeff() < 1e-10);
  }
  fs::remove_all(d);
}

TEST_CASE("control trajectories end near zero") {
  ControlGenConfig cfg;
  cfg.n_samples = 3;
  cfg.n_cells = 200;
  cfg.seed = 5;
  const fs::path d = tmp_dir("decay");
  const DatasetManifest m = gen_control_dataset(bench_fd(), cfg, d.string());
  const OperatorDataset ds = load_control_dataset(m);
  for (const auto& t : ds.targets) {
    const double peak = t.cwiseAbs().maxCoeff();
    CHECK(std::abs(t(0, ds.q() - 1)) < 0.05 * peak);
  }
  fs::remove_all(d);
}

TEST_CASE("free-flow draws are skipped rather than fatal") {
  KernelGenConfig cfg = small_kernel_cfg();
  cfg.rho_lo = 0.070;  // partially below the critical density 0.08
  cfg.rho_hi = 0.090;
  cfg.n_samples = 20;
  const fs::path d = tmp_dir("skip");
  const DatasetManifest m = gen_kernel_dataset(bench_fd(), cfg, d.string());
  CHECK(m.samples.size() < 20);
  CHECK(!m.samples.empty());
  for (const auto& s : m.samples) CHECK(s.rho_star > 0.08);
  fs::remove_all(d);
}
