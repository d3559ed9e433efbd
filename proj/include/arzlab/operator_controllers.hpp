#pragma once

#include "arzlab/controllers.hpp"
#include "arzlab/deeponet.hpp"

namespace arzlab {

/// (x=L, xi_j) query matrix (2 x n) for the kernel edge at the n nodes of a
/// triangular grid with the given length.
Eigen::MatrixXd kernel_edge_queries(double length, int n);

struct KernelEdge {
  std::vector<double> kw, kv;
};

KernelEdge infer_kernel_edge(const DeepOperatorModel& model, double lambda2,
                             double length, int n);
KernelEdge infer_kernel_edge(const PinnModel& model, double lambda2,
                             double length, int n);

/// Backstepping law with the edge kernels read off a trained operator model
/// instead of the solver.  A lambda2 outside the training interval is allowed
/// (up to the model's hard range check) but flagged as extrapolation.
class NoKernelController final : public BacksteppingController {
 public:
  NoKernelController(const DeepOperatorModel& model, const Equilibrium& eq,
                     double tau, double length, int n_edge = 101,
                     BacksteppingAssembly assembly = BacksteppingAssembly::Original,
                     std::string name = "no_kernel");

 private:
  NoKernelController(KernelEdge edge, const Equilibrium& eq, double tau,
                     double length, int n_edge, BacksteppingAssembly assembly,
                     std::string name);
};

/// Same assembly fed from a single-instance surrogate; the model itself
/// hard-errors when eq.lambda2 differs from the training instance.
class PinnKernelController final : public BacksteppingController {
 public:
  PinnKernelController(const PinnModel& model, const Equilibrium& eq,
                       double tau, double length, int n_edge = 101);

 private:
  PinnKernelController(KernelEdge edge, const Equilibrium& eq, double tau,
                       double length, int n_edge);
};

/// Open-loop playback of the learned map lambda2 -> U(t): branch input is the
/// equilibrium's lambda2, trunk input the current time.  Ignores the state by
/// construction; times beyond the training horizon are clamped with a warning.
class NoControlLawController final : public Controller {
 public:
  explicit NoControlLawController(DeepOperatorModel model);

  double compute(double t, const TrafficState& state, const Equilibrium& eq) override;
  std::string name() const override { return "no_control_law"; }

 private:
  DeepOperatorModel model_;
};

}  // namespace arzlab
