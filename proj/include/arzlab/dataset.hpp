#pragma once

#include "arzlab/arz_sim.hpp"
#include "arzlab/kernel_solver.hpp"
#include "arzlab/training.hpp"

namespace arzlab {

struct DatasetSample {
  double rho_star = 0;  // veh/m
  double lambda2 = 0;   // m/s
  std::string file;     // path relative to the manifest directory
  std::string split;    // "train" or "test"
};

/// On-disk corpus index: one JSON-lines record per sample next to the
/// per-sample CSV files.  The config hash ties every record to the exact
/// generation settings.
struct DatasetManifest {
  std::string kind;  // "kernel" or "control"
  std::vector<DatasetSample> samples;
  uint64_t config_hash = 0;
  std::string dir;  // directory holding the sample files

  int n_train() const;
  int n_test() const;

  void write(const std::string& path) const;
  static DatasetManifest read(const std::string& path);
};

struct KernelGenConfig {
  int n_samples = 1000;
  double rho_lo = 0.090;  // veh/m
  double rho_hi = 0.130;
  int grid_n = 101;    // kernel triangle nodes per edge
  double length = 500;  // m
  double tau = 60;      // s
  bool uniform_lambda2 = false;  // sample lambda2 directly instead of rho*
  uint64_t seed = 1;
  int jobs = 1;  // worker threads for sample generation (not hashed)

  std::string fingerprint() const;
};

/// Draws rho* (or lambda2) uniformly, solves the exact kernels per sample and
/// stores them as CSV files plus a manifest.  Failed solves are skipped and
/// logged to stderr; the split is a deterministic 9:1 by sample index.
DatasetManifest gen_kernel_dataset(const FundamentalDiagram& fd,
                                   const KernelGenConfig& cfg,
                                   const std::string& out_dir);

struct ControlGenConfig {
  int n_samples = 200;
  double rho_lo = 0.090;
  double rho_hi = 0.130;
  int grid_n = 101;   // kernel grid for the generating controller
  int n_cells = 400;  // simulation grid for trajectory generation
  double length = 500;
  double horizon = 300;
  double tau = 60;
  int n_out_t = 301;
  InitialKind ic = InitialKind::Sinusoidal3Pi;
  uint64_t seed = 1;
  int jobs = 1;  // worker threads for sample generation (not hashed)

  std::string fingerprint() const;
};

/// One closed-loop backstepping run per sampled rho*, recording U(t) on the
/// output time grid.  The initial-condition family is fixed across samples.
DatasetManifest gen_control_dataset(const FundamentalDiagram& fd,
                                    const ControlGenConfig& cfg,
                                    const std::string& out_dir);

/// Regression corpus from a kernel manifest: query points are every
/// `stride`-th triangle node, targets the (K^w, K^v) values there.
OperatorDataset load_kernel_dataset(const DatasetManifest& m, int stride = 2);

/// Corpus from a control manifest: query points are the output times,
/// targets the recorded U(t) [m/s].
OperatorDataset load_control_dataset(const DatasetManifest& m);

}  // namespace arzlab
