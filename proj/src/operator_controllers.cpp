#include "arzlab/operator_controllers.hpp"

namespace arzlab {

Eigen::MatrixXd kernel_edge_queries(double length, int n) {
  if (n < 2) throw DomainError("edge needs at least two nodes");
  Eigen::MatrixXd Y(2, n);
  const double h = length / (n - 1);
  for (int j = 0; j < n; ++j) {
    Y(0, j) = length;
    Y(1, j) = j * h;
  }
  return Y;
}

namespace {

template <class Model>
KernelEdge edge_from(const Model& model, double lambda2, double length, int n) {
  const Eigen::MatrixXd out = model.predict(lambda2, kernel_edge_queries(length, n));
  if (out.rows() != 2) throw ModelError("kernel model must have two output heads");
  KernelEdge e;
  e.kw.assign(out.row(0).begin(), out.row(0).end());
  e.kv.assign(out.row(1).begin(), out.row(1).end());
  return e;
}

}  // namespace

KernelEdge infer_kernel_edge(const DeepOperatorModel& model, double lambda2,
                             double length, int n) {
  return edge_from(model, lambda2, length, n);
}

KernelEdge infer_kernel_edge(const PinnModel& model, double lambda2,
                             double length, int n) {
  return edge_from(model, lambda2, length, n);
}

NoKernelController::NoKernelController(KernelEdge edge, const Equilibrium& eq,
                                       double tau, double length, int n_edge,
                                       BacksteppingAssembly assembly,
                                       std::string name)
    : BacksteppingController(std::move(edge.kw), std::move(edge.kv),
                             TriangularGrid(n_edge, length), eq, tau, assembly,
                             std::move(name)) {}

NoKernelController::NoKernelController(const DeepOperatorModel& model,
                                       const Equilibrium& eq, double tau,
                                       double length, int n_edge,
                                       BacksteppingAssembly assembly,
                                       std::string name)
    : NoKernelController(infer_kernel_edge(model, eq.lambda2, length, n_edge),
                         eq, tau, length, n_edge, assembly, std::move(name)) {
  const auto& nm = model.norm();
  if (eq.lambda2 < nm.u_lo || eq.lambda2 > nm.u_hi) {
    warn("lambda2 outside the model's training interval: extrapolating kernels");
  }
}

PinnKernelController::PinnKernelController(KernelEdge edge, const Equilibrium& eq,
                                           double tau, double length, int n_edge)
    : BacksteppingController(std::move(edge.kw), std::move(edge.kv),
                             TriangularGrid(n_edge, length), eq, tau,
                             BacksteppingAssembly::Original, "pinn_kernel") {}

PinnKernelController::PinnKernelController(const PinnModel& model,
                                           const Equilibrium& eq, double tau,
                                           double length, int n_edge)
    : PinnKernelController(infer_kernel_edge(model, eq.lambda2, length, n_edge),
                           eq, tau, length, n_edge) {}

NoControlLawController::NoControlLawController(DeepOperatorModel model)
    : model_(std::move(model)) {
  if (model_.heads() != 1 || model_.trunk_dim() != 1) {
    throw ModelError("control-law playback expects a scalar-head model on t");
  }
}

double NoControlLawController::compute(double t, const TrafficState&,
                                       const Equilibrium& eq) {
  const auto& nm = model_.norm();
  double tq = t;
  if (tq > nm.y_hi[0]) {
    warn("time beyond the training horizon: holding the terminal control value");
    tq = nm.y_hi[0];
  }
  Eigen::MatrixXd Y(1, 1);
  Y(0, 0) = tq;
  return model_.predict(eq.lambda2, Y)(0, 0);
}

}  // namespace arzlab
