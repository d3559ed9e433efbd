#pragma once

#include <functional>

#include "arzlab/deeponet.hpp"

namespace arzlab {

struct TrainConfig {
  int epochs = 1000;
  int batch = 20;
  int decay_every = 200;      // epochs between learning-rate decays
  double lr = 1e-4;
  double decay_factor = 0.5;
  double w_data = 1.0;
  double w_physics = 1.0;
  uint64_t seed = 1;
  int p = 32;
  std::vector<int> branch_hidden{64, 64};
  std::vector<int> trunk_hidden{64, 64};
  // physics-loss discretization
  double fd_step_rel = 1e-3;  // FD step for kernel derivatives, relative to L
  int phys_n = 26;            // collocation nodes per triangle edge
  bool minus_sign_convention = false;  // sign of the xi-term in the K^v residual

  void validate() const;
  std::string fingerprint() const;
};

/// Regression corpus with query points shared by all samples: sample m pairs
/// the raw scalar branch input u[m] with raw targets (heads x Q) at Y.
struct OperatorDataset {
  Eigen::MatrixXd Y;                     // dim x Q raw query coordinates
  std::vector<double> u;                 // raw branch inputs (lambda2 [m/s])
  std::vector<Eigen::MatrixXd> targets;  // heads x Q raw values
  std::vector<int> train_idx, test_idx;

  int heads() const { return targets.empty() ? 0 : static_cast<int>(targets[0].rows()); }
  int q() const { return static_cast<int>(Y.cols()); }
  void validate() const;
};

/// Ties lambda2 back to the remaining coefficients of the kernel equations
/// for the configured diagram family (lambda1 = v*, c(x) = -e^{-x/(tau v*)}/tau).
struct PhysicsSpec {
  double tau = 60;
  double length = 500;
  std::function<double(double)> lambda1_of_lambda2;
};

/// lambda1 recovered from lambda2 for V(rho) = v_f (1 - rho/rho_m):
/// lambda2 = 2 rho* v_f / rho_m - v_f  =>  v* = (v_f - lambda2)/2.
PhysicsSpec greenshields_family_physics(double v_f, double rho_m, double tau,
                                        double length);

struct TrainReport {
  std::vector<double> train_loss;    // raw-unit data MSE per epoch
  std::vector<double> test_loss;     // raw-unit data MSE on the test split
  std::vector<double> physics_loss;  // nondimensional, empty for data-only runs
  double final_test = 0;
};

Normalization fit_normalization(const OperatorDataset& ds);

/// Raw-unit mean-squared data loss over the given samples, with optional
/// parameter gradient (branch params first, then trunk).
double no_loss_and_grad(const DeepOperatorModel& m, const OperatorDataset& ds,
                        const std::vector<int>& idx, Eigen::VectorXd* grad);

/// Composite w_data * data + w_physics * physics loss of the operator model;
/// physics residuals are evaluated on a phys_n-per-edge triangular
/// collocation grid with FD derivatives and nondimensionalized so the
/// default equal weights are meaningful.
double pino_loss_and_grad(const DeepOperatorModel& m, const OperatorDataset& ds,
                          const PhysicsSpec& phys, const std::vector<int>& idx,
                          const TrainConfig& cfg, Eigen::VectorXd* grad,
                          double* data_part = nullptr, double* physics_part = nullptr);

/// Same composite for the single-instance surrogate (ds must hold exactly
/// one sample).
double pinn_loss_and_grad(const PinnModel& m, const OperatorDataset& ds,
                          const PhysicsSpec& phys, const TrainConfig& cfg,
                          Eigen::VectorXd* grad, double* data_part = nullptr,
                          double* physics_part = nullptr);

DeepOperatorModel train_no(const OperatorDataset& ds, const TrainConfig& cfg,
                           TrainReport* report = nullptr);
DeepOperatorModel train_pino(const OperatorDataset& ds, const PhysicsSpec& phys,
                             const TrainConfig& cfg, TrainReport* report = nullptr);
PinnModel train_pinn(const OperatorDataset& single_sample, const PhysicsSpec& phys,
                     const TrainConfig& cfg, TrainReport* report = nullptr);
DeepOperatorModel train_control_law(const OperatorDataset& ds,
                                    const TrainConfig& cfg,
                                    TrainReport* report = nullptr);

}  // namespace arzlab
