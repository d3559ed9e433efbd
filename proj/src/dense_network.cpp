#include "arzlab/dense_network.hpp"

#include <cmath>

namespace arzlab {

DenseNetwork::DenseNetwork(const std::vector<int>& widths, std::mt19937_64& rng)
    : widths_(widths) {
  if (widths_.size() < 2) throw DomainError("network needs at least two layers");
  for (int w : widths_) {
    if (w <= 0) throw DomainError("layer widths must be positive");
  }
  W_.resize(widths_.size() - 1);
  b_.resize(widths_.size() - 1);
  for (size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int in = widths_[l], out = widths_[l + 1];
    // Glorot uniform; draw order is fixed for determinism
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    W_[l].resize(out, in);
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) W_[l](i, j) = dist(rng);
    }
    b_[l] = Eigen::VectorXd::Zero(out);
  }
}

size_t DenseNetwork::n_params() const {
  size_t n = 0;
  for (size_t l = 0; l < W_.size(); ++l) n += W_[l].size() + b_[l].size();
  return n;
}

Eigen::MatrixXd DenseNetwork::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != n_inputs()) throw DomainError("input batch has wrong row count");
  if (cache) {
    cache->a.resize(W_.size() + 1);
    cache->a[0] = x;
  }
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l < W_.size(); ++l) {
    Eigen::MatrixXd z = (W_[l] * a).colwise() + b_[l];
    a = (l + 1 < W_.size()) ? z.array().tanh().matrix() : std::move(z);
    if (cache) cache->a[l + 1] = a;
  }
  return a;
}

void DenseNetwork::grad_shapes(std::vector<Eigen::MatrixXd>& dW,
                               std::vector<Eigen::VectorXd>& db) const {
  dW.resize(W_.size());
  db.resize(b_.size());
  for (size_t l = 0; l < W_.size(); ++l) {
    dW[l] = Eigen::MatrixXd::Zero(W_[l].rows(), W_[l].cols());
    db[l] = Eigen::VectorXd::Zero(b_[l].size());
  }
}

Eigen::MatrixXd DenseNetwork::backward(const Cache& cache, const Eigen::MatrixXd& dy,
                                       std::vector<Eigen::MatrixXd>& dW,
                                       std::vector<Eigen::VectorXd>& db) const {
  if (cache.a.size() != W_.size() + 1) throw DomainError("stale forward cache");
  Eigen::MatrixXd delta = dy;
  for (int l = static_cast<int>(W_.size()) - 1; l >= 0; --l) {
    if (static_cast<size_t>(l) + 1 < W_.size()) {
      // through tanh: a' = 1 - a^2 with a the cached activation
      delta = delta.cwiseProduct(
          (1.0 - cache.a[l + 1].array().square()).matrix());
    }
    dW[l].noalias() += delta * cache.a[l].transpose();
    db[l] += delta.rowwise().sum();
    if (l > 0) delta = W_[l].transpose() * delta;
  }
  return W_[0].transpose() * delta;
}

void DenseNetwork::append_params(std::vector<double>& out) const {
  for (size_t l = 0; l < W_.size(); ++l) {
    for (int i = 0; i < W_[l].rows(); ++i) {
      for (int j = 0; j < W_[l].cols(); ++j) out.push_back(W_[l](i, j));
    }
    for (int i = 0; i < b_[l].size(); ++i) out.push_back(b_[l](i));
  }
}

size_t DenseNetwork::read_params(const double* data, size_t avail) {
  size_t k = 0;
  for (size_t l = 0; l < W_.size(); ++l) {
    for (int i = 0; i < W_[l].rows(); ++i) {
      for (int j = 0; j < W_[l].cols(); ++j) {
        if (k >= avail) throw IoError("parameter stream truncated");
        W_[l](i, j) = data[k++];
      }
    }
    for (int i = 0; i < b_[l].size(); ++i) {
      if (k >= avail) throw IoError("parameter stream truncated");
      b_[l](i) = data[k++];
    }
  }
  return k;
}

void DenseNetwork::apply_update(const std::vector<Eigen::MatrixXd>& dW,
                                const std::vector<Eigen::VectorXd>& db,
                                double scale) {
  for (size_t l = 0; l < W_.size(); ++l) {
    W_[l] += scale * dW[l];
    b_[l] += scale * db[l];
  }
}

Adam::Adam(size_t n, double beta1, double beta2, double eps)
    : m_(Eigen::VectorXd::Zero(n)),
      v_(Eigen::VectorXd::Zero(n)),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DomainError("Adam state does not match parameter count");
  }
  ++t_;
  m_ = beta1_ * m_ + (1 - beta1_) * grad;
  v_ = beta2_ * v_ + (1 - beta2_) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  params -= (lr / bc1) * m_.cwiseQuotient(
                ((v_ / bc2).cwiseSqrt().array() + eps_).matrix());
}

}  // namespace arzlab
