#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "arzlab/errors.hpp"

namespace arzlab {

/// Fully connected network with tanh hidden activations and a linear output
/// layer.  Columns are samples: forward maps (in x N) to (out x N).
class DenseNetwork {
 public:
  DenseNetwork() = default;
  DenseNetwork(const std::vector<int>& widths, std::mt19937_64& rng);

  const std::vector<int>& widths() const { return widths_; }
  int n_inputs() const { return widths_.front(); }
  int n_outputs() const { return widths_.back(); }
  int n_layers() const { return static_cast<int>(W_.size()); }
  size_t n_params() const;

  /// Post-activation values per layer, kept for the backward pass.
  /// a[0] is the input batch, a[n_layers] the network output.
  struct Cache {
    std::vector<Eigen::MatrixXd> a;
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;

  /// Reverse-mode pass: accumulates parameter gradients (dW, db must be
  /// zero-initialized to the parameter shapes; see grad_shapes) and returns
  /// the loss gradient with respect to the input batch.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dy,
                           std::vector<Eigen::MatrixXd>& dW,
                           std::vector<Eigen::VectorXd>& db) const;

  void grad_shapes(std::vector<Eigen::MatrixXd>& dW,
                   std::vector<Eigen::VectorXd>& db) const;

  /// Parameter (de)serialization in a fixed order: per layer W row-major,
  /// then b.
  void append_params(std::vector<double>& out) const;
  size_t read_params(const double* data, size_t avail);

  void apply_update(const std::vector<Eigen::MatrixXd>& dW,
                    const std::vector<Eigen::VectorXd>& db, double scale);

  Eigen::MatrixXd& weight(int layer) { return W_[layer]; }
  const Eigen::MatrixXd& weight(int layer) const { return W_[layer]; }
  Eigen::VectorXd& bias(int layer) { return b_[layer]; }
  const Eigen::VectorXd& bias(int layer) const { return b_[layer]; }

 private:
  std::vector<int> widths_;
  std::vector<Eigen::MatrixXd> W_;  // out x in per layer
  std::vector<Eigen::VectorXd> b_;
};

/// Adam over a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  explicit Adam(size_t n, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  /// In-place descent step on params given the gradient and learning rate.
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

  long steps_taken() const { return t_; }

 private:
  Eigen::VectorXd m_, v_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
};

}  // namespace arzlab
