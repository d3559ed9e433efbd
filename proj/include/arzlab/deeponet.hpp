#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arzlab/dense_network.hpp"

namespace arzlab {

/// Input/output statistics frozen at training time and stored with the
/// model.  Branch input and trunk coordinates are affinely mapped to
/// [-1, 1]; outputs are standardized per head.
struct Normalization {
  double u_lo = 0, u_hi = 1;       // branch input range (SI)
  std::vector<double> y_lo, y_hi;  // per trunk input dimension
  std::vector<double> out_mean, out_std;  // per output head

  double norm_u(double u) const {
    return 2.0 * (u - u_lo) / (u_hi - u_lo) - 1.0;
  }
  double norm_y(int d, double y) const {
    return 2.0 * (y - y_lo[d]) / (y_hi[d] - y_lo[d]) - 1.0;
  }
};

/// Branch-trunk operator model: the branch encodes the scalar input u, the
/// trunk the query coordinate y, and each output head is the p-term dot
/// product of its basis slices.
class DeepOperatorModel {
 public:
  DeepOperatorModel() = default;
  /// hidden widths exclude the input and the final p*heads basis layer
  DeepOperatorModel(int p, int heads, int trunk_dim,
                    const std::vector<int>& branch_hidden,
                    const std::vector<int>& trunk_hidden, Normalization norm,
                    uint64_t seed);

  int p() const { return p_; }
  int heads() const { return heads_; }
  int trunk_dim() const { return trunk_.n_inputs(); }
  const Normalization& norm() const { return norm_; }
  Normalization& norm() { return norm_; }
  DenseNetwork& branch() { return branch_; }
  const DenseNetwork& branch() const { return branch_; }
  DenseNetwork& trunk() { return trunk_; }
  const DenseNetwork& trunk() const { return trunk_; }
  uint64_t seed() const { return seed_; }
  uint64_t config_hash() const { return config_hash_; }
  void set_config_hash(uint64_t h) { config_hash_ = h; }

  /// Denormalized head outputs (heads x Q) at raw query points Y (dim x Q)
  /// for raw branch input u.  Throws DomainError when u is so far outside
  /// the training range that it looks unnormalized (|normalized| > 3).
  Eigen::MatrixXd predict(double u, const Eigen::MatrixXd& Y) const;

  /// Standardized-space composition of precomputed branch/trunk outputs:
  /// out_h = branch_rows_h . trunk_rows_h, shape (heads*B) x Q collapsed to
  /// per-head blocks.  Used by the trainers.
  static Eigen::MatrixXd compose_head(const Eigen::MatrixXd& branch_out,
                                      const Eigen::MatrixXd& trunk_out, int p,
                                      int head);

  // flat parameter vector: branch first, then trunk
  size_t n_params() const { return branch_.n_params() + trunk_.n_params(); }
  Eigen::VectorXd get_params() const;
  void set_params(const Eigen::VectorXd& p);

 private:
  int p_ = 0, heads_ = 0;
  DenseNetwork branch_, trunk_;
  Normalization norm_;
  uint64_t seed_ = 0, config_hash_ = 0;
};

/// Single-instance kernel surrogate: one network on (x, xi) trained for one
/// fixed lambda2; querying any other lambda2 is a hard error.
struct PinnModel {
  DenseNetwork net;  // input (x, xi), output (K^w, K^v) standardized
  Normalization norm;
  double lambda2 = 0;
  uint64_t seed = 0, config_hash = 0;

  /// Denormalized (2 x Q) kernel values; `lambda2_query` must match the
  /// training instance to 1e-9 relative.
  Eigen::MatrixXd predict(double lambda2_query, const Eigen::MatrixXd& Y) const;
};

// Self-describing binary model container; round-trips are bit-exact.
void save_model(const DeepOperatorModel& m, const std::string& path);
void save_model(const PinnModel& m, const std::string& path);
DeepOperatorModel load_model(const std::string& path);
PinnModel load_pinn_model(const std::string& path);
/// Peeks at the container kind: "deeponet" or "pinn".
std::string model_kind(const std::string& path);

uint64_t fnv1a(const std::string& s);

}  // namespace arzlab
