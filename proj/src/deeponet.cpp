#include "arzlab/deeponet.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace arzlab {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

DeepOperatorModel::DeepOperatorModel(int p, int heads, int trunk_dim,
                                     const std::vector<int>& branch_hidden,
                                     const std::vector<int>& trunk_hidden,
                                     Normalization norm, uint64_t seed)
    : p_(p), heads_(heads), norm_(std::move(norm)), seed_(seed) {
  if (p <= 0 || heads <= 0) throw DomainError("basis and head counts must be positive");
  if (static_cast<int>(norm_.y_lo.size()) != trunk_dim ||
      static_cast<int>(norm_.y_hi.size()) != trunk_dim ||
      static_cast<int>(norm_.out_mean.size()) != heads ||
      static_cast<int>(norm_.out_std.size()) != heads) {
    throw DomainError("normalization statistics do not match the model shape");
  }
  std::vector<int> bw{1};
  bw.insert(bw.end(), branch_hidden.begin(), branch_hidden.end());
  bw.push_back(p * heads);
  std::vector<int> tw{trunk_dim};
  tw.insert(tw.end(), trunk_hidden.begin(), trunk_hidden.end());
  tw.push_back(p * heads);
  std::mt19937_64 rng(seed);
  branch_ = DenseNetwork(bw, rng);
  trunk_ = DenseNetwork(tw, rng);
}

Eigen::MatrixXd DeepOperatorModel::compose_head(const Eigen::MatrixXd& branch_out,
                                                const Eigen::MatrixXd& trunk_out,
                                                int p, int head) {
  return branch_out.middleRows(head * p, p).transpose() *
         trunk_out.middleRows(head * p, p);
}

Eigen::MatrixXd DeepOperatorModel::predict(double u, const Eigen::MatrixXd& Y) const {
  const double un = norm_.norm_u(u);
  if (std::abs(un) > 3.0) {
    throw DomainError("branch input " + std::to_string(u) +
                      " is far outside the training range [" +
                      std::to_string(norm_.u_lo) + ", " +
                      std::to_string(norm_.u_hi) + "]; is it unnormalized?");
  }
  if (Y.rows() != trunk_.n_inputs()) {
    throw DomainError("query points have wrong dimension");
  }
  Eigen::MatrixXd Yn(Y.rows(), Y.cols());
  for (int d = 0; d < Y.rows(); ++d) {
    for (int q = 0; q < Y.cols(); ++q) Yn(d, q) = norm_.norm_y(d, Y(d, q));
  }
  Eigen::MatrixXd bu(1, 1);
  bu(0, 0) = un;
  const Eigen::MatrixXd bo = branch_.forward(bu);    // (p*heads) x 1
  const Eigen::MatrixXd to = trunk_.forward(Yn);     // (p*heads) x Q
  Eigen::MatrixXd out(heads_, Y.cols());
  for (int h = 0; h < heads_; ++h) {
    out.row(h) = norm_.out_mean[h] +
                 norm_.out_std[h] * compose_head(bo, to, p_, h).array();
  }
  return out;
}

Eigen::VectorXd DeepOperatorModel::get_params() const {
  std::vector<double> flat;
  flat.reserve(n_params());
  branch_.append_params(flat);
  trunk_.append_params(flat);
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
}

void DeepOperatorModel::set_params(const Eigen::VectorXd& p) {
  if (static_cast<size_t>(p.size()) != n_params()) {
    throw DomainError("parameter vector has wrong length");
  }
  const size_t used = branch_.read_params(p.data(), p.size());
  trunk_.read_params(p.data() + used, p.size() - used);
}

Eigen::MatrixXd PinnModel::predict(double lambda2_query,
                                   const Eigen::MatrixXd& Y) const {
  if (std::abs(lambda2_query - lambda2) > 1e-9 * std::abs(lambda2)) {
    throw ModelError("single-instance kernel model was trained for lambda2=" +
                     std::to_string(lambda2) + " m/s, queried at " +
                     std::to_string(lambda2_query));
  }
  Eigen::MatrixXd Yn(Y.rows(), Y.cols());
  for (int d = 0; d < Y.rows(); ++d) {
    for (int q = 0; q < Y.cols(); ++q) Yn(d, q) = norm.norm_y(d, Y(d, q));
  }
  Eigen::MatrixXd out = net.forward(Yn);
  for (int h = 0; h < out.rows(); ++h) {
    out.row(h) = norm.out_mean[h] + norm.out_std[h] * out.row(h).array();
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'A', 'R', 'Z', 'N', 'N', '0', '1', '\n'};

void put_u64(std::FILE* f, uint64_t v) { std::fwrite(&v, 8, 1, f); }
void put_f64(std::FILE* f, double v) { std::fwrite(&v, 8, 1, f); }

uint64_t get_u64(std::FILE* f) {
  uint64_t v;
  if (std::fread(&v, 8, 1, f) != 1) throw IoError("model file truncated");
  return v;
}
double get_f64(std::FILE* f) {
  double v;
  if (std::fread(&v, 8, 1, f) != 1) throw IoError("model file truncated");
  return v;
}

void put_vec(std::FILE* f, const std::vector<double>& v) {
  put_u64(f, v.size());
  std::fwrite(v.data(), 8, v.size(), f);
}
std::vector<double> get_vec(std::FILE* f) {
  const uint64_t n = get_u64(f);
  if (n > (1u << 28)) throw IoError("model file corrupt (absurd array size)");
  std::vector<double> v(n);
  if (std::fread(v.data(), 8, v.size(), f) != v.size()) {
    throw IoError("model file truncated");
  }
  return v;
}

void put_net(std::FILE* f, const DenseNetwork& net) {
  put_u64(f, net.widths().size());
  for (int w : net.widths()) put_u64(f, static_cast<uint64_t>(w));
  std::vector<double> flat;
  flat.reserve(net.n_params());
  net.append_params(flat);
  put_vec(f, flat);
}

DenseNetwork get_net(std::FILE* f) {
  const uint64_t n_widths = get_u64(f);
  if (n_widths < 2 || n_widths > 64) {
    throw IoError("model file corrupt (layer count)");
  }
  std::vector<int> widths(n_widths);
  for (auto& w : widths) {
    w = static_cast<int>(get_u64(f));
    if (w <= 0 || w > (1 << 20)) throw IoError("model file corrupt (layer width)");
  }
  std::mt19937_64 rng(0);
  DenseNetwork net(widths, rng);
  const auto flat = get_vec(f);
  if (flat.size() != net.n_params()) throw IoError("model file corrupt (params)");
  net.read_params(flat.data(), flat.size());
  return net;
}

void put_norm(std::FILE* f, const Normalization& n) {
  put_f64(f, n.u_lo);
  put_f64(f, n.u_hi);
  put_vec(f, n.y_lo);
  put_vec(f, n.y_hi);
  put_vec(f, n.out_mean);
  put_vec(f, n.out_std);
}
Normalization get_norm(std::FILE* f) {
  Normalization n;
  n.u_lo = get_f64(f);
  n.u_hi = get_f64(f);
  n.y_lo = get_vec(f);
  n.y_hi = get_vec(f);
  n.out_mean = get_vec(f);
  n.out_std = get_vec(f);
  return n;
}

struct FileGuard {
  std::FILE* f;
  ~FileGuard() {
    if (f) std::fclose(f);
  }
};

std::FILE* open_checked(const std::string& path, const char* mode) {
  std::FILE* f = std::fopen(path.c_str(), mode);
  if (!f) throw IoError("cannot open " + path);
  return f;
}

uint8_t read_header(std::FILE* f, const std::string& path) {
  char magic[8];
  if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kMagic, 8) != 0) {
    throw IoError(path + ": not a model file or unsupported version");
  }
  uint8_t kind;
  if (std::fread(&kind, 1, 1, f) != 1) throw IoError(path + ": truncated");
  return kind;
}

}  // namespace

void save_model(const DeepOperatorModel& m, const std::string& path) {
  std::FILE* f = open_checked(path, "wb");
  FileGuard g{f};
  std::fwrite(kMagic, 1, 8, f);
  const uint8_t kind = 0;  // deeponet
  std::fwrite(&kind, 1, 1, f);
  put_u64(f, m.seed());
  put_u64(f, m.config_hash());
  put_u64(f, static_cast<uint64_t>(m.p()));
  put_u64(f, static_cast<uint64_t>(m.heads()));
  put_norm(f, m.norm());
  put_net(f, m.branch());
  put_net(f, m.trunk());
}

void save_model(const PinnModel& m, const std::string& path) {
  std::FILE* f = open_checked(path, "wb");
  FileGuard g{f};
  std::fwrite(kMagic, 1, 8, f);
  const uint8_t kind = 1;  // single-instance surrogate
  std::fwrite(&kind, 1, 1, f);
  put_u64(f, m.seed);
  put_u64(f, m.config_hash);
  put_f64(f, m.lambda2);
  put_norm(f, m.norm);
  put_net(f, m.net);
}

std::string model_kind(const std::string& path) {
  std::FILE* f = open_checked(path, "rb");
  FileGuard g{f};
  return read_header(f, path) == 0 ? "deeponet" : "pinn";
}

DeepOperatorModel load_model(const std::string& path) {
  std::FILE* f = open_checked(path, "rb");
  FileGuard g{f};
  if (read_header(f, path) != 0) {
    throw IoError(path + ": expected an operator model, found a single-instance one");
  }
  const uint64_t seed = get_u64(f);
  const uint64_t hash = get_u64(f);
  const int p = static_cast<int>(get_u64(f));
  const int heads = static_cast<int>(get_u64(f));
  Normalization norm = get_norm(f);
  DenseNetwork branch = get_net(f);
  DenseNetwork trunk = get_net(f);

  // rebuild through the constructor to validate shape consistency
  std::vector<int> bh(branch.widths().begin() + 1, branch.widths().end() - 1);
  std::vector<int> th(trunk.widths().begin() + 1, trunk.widths().end() - 1);
  DeepOperatorModel m(p, heads, trunk.n_inputs(), bh, th, norm, seed);
  if (branch.n_outputs() != p * heads || trunk.n_outputs() != p * heads) {
    throw IoError(path + ": basis layer does not match p*heads");
  }
  m.branch() = std::move(branch);
  m.trunk() = std::move(trunk);
  m.set_config_hash(hash);
  return m;
}

PinnModel load_pinn_model(const std::string& path) {
  std::FILE* f = open_checked(path, "rb");
  FileGuard g{f};
  if (read_header(f, path) != 1) {
    throw IoError(path + ": expected a single-instance model, found an operator one");
  }
  PinnModel m;
  m.seed = get_u64(f);
  m.config_hash = get_u64(f);
  m.lambda2 = get_f64(f);
  m.norm = get_norm(f);
  m.net = get_net(f);
  return m;
}

}  // namespace arzlab
