#include "arzlab/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <random>
#include <thread>

#include <json.hpp>

#include "arzlab/controllers.hpp"

namespace fs = std::filesystem;

namespace arzlab {

int DatasetManifest::n_train() const {
  int n = 0;
  for (const auto& s : samples) n += (s.split == "train");
  return n;
}
int DatasetManifest::n_test() const {
  return static_cast<int>(samples.size()) - n_train();
}

void DatasetManifest::write(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash);
  for (const auto& s : samples) {
    nlohmann::json rec{{"config_hash", hash},
                       {"file", s.file},
                       {"kind", kind},
                       {"lambda2", s.lambda2},
                       {"rho_star", s.rho_star},
                       {"split", s.split}};
    const std::string line = rec.dump();
    std::fwrite(line.data(), 1, line.size(), f);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

DatasetManifest DatasetManifest::read(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::string text;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);

  DatasetManifest m;
  m.dir = fs::path(path).parent_path().string();
  if (m.dir.empty()) m.dir = ".";
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ": bad manifest line: " + e.what());
    }
    DatasetSample s;
    s.file = rec.at("file").get<std::string>();
    s.lambda2 = rec.at("lambda2").get<double>();
    s.rho_star = rec.at("rho_star").get<double>();
    s.split = rec.at("split").get<std::string>();
    const std::string kind = rec.at("kind").get<std::string>();
    const uint64_t hash =
        std::stoull(rec.at("config_hash").get<std::string>(), nullptr, 16);
    if (m.samples.empty()) {
      m.kind = kind;
      m.config_hash = hash;
    } else if (kind != m.kind || hash != m.config_hash) {
      throw IoError(path + ": manifest mixes sample kinds or config hashes");
    }
    if (s.split != "train" && s.split != "test") {
      throw IoError(path + ": unknown split tag '" + s.split + "'");
    }
    m.samples.push_back(std::move(s));
  }
  if (m.samples.empty()) throw IoError(path + ": empty manifest");
  return m;
}

std::string KernelGenConfig::fingerprint() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "kernel;n=%d;rho=[%.17g,%.17g];grid=%d;L=%.17g;tau=%.17g;"
                "uniform_l2=%d;seed=%llu",
                n_samples, rho_lo, rho_hi, grid_n, length, tau,
                uniform_lambda2 ? 1 : 0,
                static_cast<unsigned long long>(seed));
  return buf;
}

std::string ControlGenConfig::fingerprint() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "control;n=%d;rho=[%.17g,%.17g];grid=%d;cells=%d;L=%.17g;"
                "T=%.17g;tau=%.17g;nt=%d;ic=%d;seed=%llu",
                n_samples, rho_lo, rho_hi, grid_n, n_cells, length, horizon,
                tau, n_out_t, static_cast<int>(ic),
                static_cast<unsigned long long>(seed));
  return buf;
}

namespace {

std::string split_of(int index) { return index % 10 == 9 ? "test" : "train"; }

/// Strided worker fan-out; results land in preallocated slots, so the output
/// order (and everything derived from it) is independent of `jobs`.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += jobs) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// rho* whose equilibrium lambda2 equals the target; lambda2 is monotone in
/// rho* on the congested interval, so bisection suffices.
double rho_for_lambda2(const FundamentalDiagram& fd, double target, double lo,
                       double hi) {
  auto l2 = [&](double r) { return equilibrium_from_density(fd, r).lambda2; };
  double flo = l2(lo) - target, fhi = l2(hi) - target;
  if (flo * fhi > 0) throw DomainError("target lambda2 outside the rho* range");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = l2(mid) - target;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> draw_rho_stars(const FundamentalDiagram& fd, int n,
                                   double rho_lo, double rho_hi,
                                   bool uniform_lambda2, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  if (uniform_lambda2) {
    const double a = equilibrium_from_density(fd, rho_lo).lambda2;
    const double b = equilibrium_from_density(fd, rho_hi).lambda2;
    std::uniform_real_distribution<double> dist(std::min(a, b), std::max(a, b));
    for (auto& r : out) r = rho_for_lambda2(fd, dist(rng), rho_lo, rho_hi);
  } else {
    std::uniform_real_distribution<double> dist(rho_lo, rho_hi);
    for (auto& r : out) r = dist(rng);
  }
  return out;
}

void write_control_csv(const std::string& path, double lambda2, double rho_star,
                       const std::vector<double>& t,
                       const std::vector<double>& u) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "#params lambda2=%.17g rho_star=%.17g\n", lambda2, rho_star);
  std::fprintf(f, "t,u\n");
  for (size_t k = 0; k < t.size(); ++k) {
    std::fprintf(f, "%.17g,%.17g\n", t[k], u[k]);
  }
  std::fclose(f);
}

void read_control_csv(const std::string& path, std::vector<double>& t,
                      std::vector<double>& u) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  char line[512];
  t.clear();
  u.clear();
  while (std::fgets(line, sizeof line, f)) {
    if (line[0] == '#' || line[0] == 't') continue;
    double tv, uv;
    if (std::sscanf(line, "%lf,%lf", &tv, &uv) != 2) {
      std::fclose(f);
      throw IoError(path + ": malformed trajectory row");
    }
    t.push_back(tv);
    u.push_back(uv);
  }
  std::fclose(f);
  if (t.size() < 2) throw IoError(path + ": trajectory too short");
}

}  // namespace

DatasetManifest gen_kernel_dataset(const FundamentalDiagram& fd,
                                   const KernelGenConfig& cfg,
                                   const std::string& out_dir) {
  if (cfg.n_samples < 2) throw DomainError("need at least two samples");
  fs::create_directories(out_dir);
  const auto rho_stars = draw_rho_stars(fd, cfg.n_samples, cfg.rho_lo,
                                        cfg.rho_hi, cfg.uniform_lambda2,
                                        cfg.seed);
  DatasetManifest m;
  m.kind = "kernel";
  m.config_hash = fnv1a(cfg.fingerprint());
  m.dir = out_dir;
  std::vector<KernelField> fields(cfg.n_samples);
  std::vector<double> lambda2s(cfg.n_samples);
  std::vector<std::string> errors(cfg.n_samples);
  parallel_for(cfg.n_samples, cfg.jobs, [&](int i) {
    try {
      const Equilibrium eq = equilibrium_from_density(fd, rho_stars[i]);
      fields[i] = solve_kernels(eq, cfg.tau, cfg.length, cfg.grid_n);
      lambda2s[i] = eq.lambda2;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (int i = 0; i < cfg.n_samples; ++i) {
    if (!errors[i].empty()) {
      std::fprintf(stderr, "sample %d (rho*=%.6g) skipped: %s\n", i,
                   rho_stars[i], errors[i].c_str());
      continue;
    }
    char name[64];
    std::snprintf(name, sizeof name, "kernel_%04d.csv", i);
    fields[i].write_csv((fs::path(out_dir) / name).string());
    m.samples.push_back({rho_stars[i], lambda2s[i], name, split_of(i)});
  }
  if (m.samples.empty()) throw NumericalError("all kernel samples failed", 0);
  m.write((fs::path(out_dir) / "manifest.jsonl").string());
  return m;
}

DatasetManifest gen_control_dataset(const FundamentalDiagram& fd,
                                    const ControlGenConfig& cfg,
                                    const std::string& out_dir) {
  if (cfg.n_samples < 2) throw DomainError("need at least two samples");
  fs::create_directories(out_dir);
  const auto rho_stars = draw_rho_stars(fd, cfg.n_samples, cfg.rho_lo,
                                        cfg.rho_hi, false, cfg.seed);
  DatasetManifest m;
  m.kind = "control";
  m.config_hash = fnv1a(cfg.fingerprint());
  m.dir = out_dir;
  struct Traj {
    std::vector<double> t, u;
    double lambda2 = 0;
  };
  std::vector<Traj> trajs(cfg.n_samples);
  std::vector<std::string> errors(cfg.n_samples);
  parallel_for(cfg.n_samples, cfg.jobs, [&](int i) {
    try {
      const Equilibrium eq = equilibrium_from_density(fd, rho_stars[i]);
      const KernelField kf = solve_kernels(eq, cfg.tau, cfg.length, cfg.grid_n);
      BacksteppingController ctl(kf, eq);
      SimConfig sim;
      sim.grid = Grid1D(cfg.length, cfg.n_cells);
      sim.horizon = cfg.horizon;
      sim.tau = cfg.tau;
      sim.fd = std::shared_ptr<const FundamentalDiagram>(fd.clone());
      sim.eq = eq;
      sim.n_out_t = cfg.n_out_t;
      const TrafficState ic = make_initial(cfg.ic, eq, sim.grid, fd.rho_max());
      const ScenarioResult res = run_closed_loop(ic, sim, ctl);
      trajs[i] = {res.t, res.u, eq.lambda2};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (int i = 0; i < cfg.n_samples; ++i) {
    if (!errors[i].empty()) {
      std::fprintf(stderr, "sample %d (rho*=%.6g) skipped: %s\n", i,
                   rho_stars[i], errors[i].c_str());
      continue;
    }
    char name[64];
    std::snprintf(name, sizeof name, "control_%04d.csv", i);
    write_control_csv((fs::path(out_dir) / name).string(), trajs[i].lambda2,
                      rho_stars[i], trajs[i].t, trajs[i].u);
    m.samples.push_back({rho_stars[i], trajs[i].lambda2, name, split_of(i)});
  }
  if (m.samples.empty()) throw NumericalError("all control samples failed", 0);
  m.write((fs::path(out_dir) / "manifest.jsonl").string());
  return m;
}

OperatorDataset load_kernel_dataset(const DatasetManifest& m, int stride) {
  if (m.kind != "kernel") throw IoError("manifest does not describe kernels");
  if (stride < 1) throw DomainError("stride must be positive");
  OperatorDataset ds;
  bool first = true;
  for (const auto& s : m.samples) {
    const KernelField kf =
        KernelField::read_csv((fs::path(m.dir) / s.file).string());
    const auto& g = kf.grid();
    if (first) {
      int q = 0;
      for (int i = 0; i < g.n; i += stride) {
        for (int j = 0; j <= i; j += stride) ++q;
      }
      ds.Y.resize(2, q);
      int k = 0;
      for (int i = 0; i < g.n; i += stride) {
        for (int j = 0; j <= i; j += stride) {
          ds.Y(0, k) = g.node(i);
          ds.Y(1, k) = g.node(j);
          ++k;
        }
      }
      first = false;
    }
    Eigen::MatrixXd tgt(2, ds.Y.cols());
    int k = 0;
    for (int i = 0; i < g.n; i += stride) {
      for (int j = 0; j <= i; j += stride) {
        tgt(0, k) = kf.kw(i, j);
        tgt(1, k) = kf.kv(i, j);
        ++k;
      }
    }
    const int idx = static_cast<int>(ds.u.size());
    ds.u.push_back(kf.lambda2());
    ds.targets.push_back(std::move(tgt));
    (s.split == "train" ? ds.train_idx : ds.test_idx).push_back(idx);
  }
  ds.validate();
  return ds;
}

OperatorDataset load_control_dataset(const DatasetManifest& m) {
  if (m.kind != "control") throw IoError("manifest does not describe trajectories");
  OperatorDataset ds;
  std::vector<double> t, u;
  for (const auto& s : m.samples) {
    read_control_csv((fs::path(m.dir) / s.file).string(), t, u);
    if (ds.u.empty()) {
      ds.Y.resize(1, t.size());
      for (size_t k = 0; k < t.size(); ++k) ds.Y(0, k) = t[k];
    } else if (static_cast<int>(t.size()) != ds.q()) {
      throw IoError(s.file + ": trajectory length differs from the corpus");
    }
    Eigen::MatrixXd tgt(1, u.size());
    for (size_t k = 0; k < u.size(); ++k) tgt(0, k) = u[k];
    const int idx = static_cast<int>(ds.u.size());
    ds.u.push_back(s.lambda2);
    ds.targets.push_back(std::move(tgt));
    (s.split == "train" ? ds.train_idx : ds.test_idx).push_back(idx);
  }
  ds.validate();
  return ds;
}

}  // namespace arzlab
