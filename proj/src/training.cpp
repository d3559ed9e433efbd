#include "arzlab/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace arzlab {

void TrainConfig::validate() const {
  if (epochs <= 0 || batch <= 0 || decay_every <= 0) {
    throw DomainError("epochs, batch size and decay interval must be positive");
  }
  if (!(lr > 0.0) || !(decay_factor > 0.0) || !(fd_step_rel > 0.0)) {
    throw DomainError("learning rate, decay factor and FD step must be positive");
  }
  if (w_data < 0.0 || w_physics < 0.0) {
    throw DomainError("loss weights must be non-negative");
  }
  if (p <= 0 || phys_n < 3) {
    throw DomainError("basis size must be positive and phys_n >= 3");
  }
}

std::string TrainConfig::fingerprint() const {
  std::ostringstream os;
  os << "epochs=" << epochs << ";batch=" << batch << ";decay=" << decay_every
     << ";lr=" << lr << ";factor=" << decay_factor << ";wd=" << w_data
     << ";wp=" << w_physics << ";seed=" << seed << ";p=" << p << ";bh=";
  for (int w : branch_hidden) os << w << ",";
  os << ";th=";
  for (int w : trunk_hidden) os << w << ",";
  os << ";fd=" << fd_step_rel << ";physn=" << phys_n
     << ";minus=" << minus_sign_convention;
  return os.str();
}

void OperatorDataset::validate() const {
  if (u.empty() || targets.size() != u.size()) {
    throw DomainError("dataset is empty or inputs/targets mismatch");
  }
  for (const auto& t : targets) {
    if (t.cols() != Y.cols() || t.rows() != targets[0].rows()) {
      throw DomainError("dataset target shapes are inconsistent");
    }
  }
}

PhysicsSpec greenshields_family_physics(double v_f, double rho_m, double tau,
                                        double length) {
  (void)rho_m;  // lambda2 = 2 rho* v_f/rho_m - v_f eliminates rho_m from v*
  PhysicsSpec spec;
  spec.tau = tau;
  spec.length = length;
  spec.lambda1_of_lambda2 = [v_f](double l2) { return 0.5 * (v_f - l2); };
  return spec;
}

Normalization fit_normalization(const OperatorDataset& ds) {
  ds.validate();
  const std::vector<int>* idx = &ds.train_idx;
  std::vector<int> all;
  if (idx->empty()) {
    all.resize(ds.u.size());
    std::iota(all.begin(), all.end(), 0);
    idx = &all;
  }
  Normalization n;
  n.u_lo = n.u_hi = ds.u[(*idx)[0]];
  for (int i : *idx) {
    n.u_lo = std::min(n.u_lo, ds.u[i]);
    n.u_hi = std::max(n.u_hi, ds.u[i]);
  }
  if (n.u_hi <= n.u_lo) n.u_hi = n.u_lo + 1.0;  // single-instance corpus
  for (int d = 0; d < ds.Y.rows(); ++d) {
    n.y_lo.push_back(ds.Y.row(d).minCoeff());
    n.y_hi.push_back(ds.Y.row(d).maxCoeff());
    if (n.y_hi[d] <= n.y_lo[d]) n.y_hi[d] = n.y_lo[d] + 1.0;
  }
  const int heads = ds.heads();
  const double count = static_cast<double>(idx->size()) * ds.q();
  for (int h = 0; h < heads; ++h) {
    double s = 0, s2 = 0;
    for (int i : *idx) {
      s += ds.targets[i].row(h).sum();
      s2 += ds.targets[i].row(h).array().square().sum();
    }
    const double mean = s / count;
    const double var = std::max(s2 / count - mean * mean, 0.0);
    n.out_mean.push_back(mean);
    n.out_std.push_back(var > 1e-30 ? std::sqrt(var) : 1.0);
  }
  return n;
}

namespace {

Eigen::MatrixXd normalize_queries(const Normalization& n, const Eigen::MatrixXd& Y) {
  Eigen::MatrixXd Yn(Y.rows(), Y.cols());
  for (int d = 0; d < Y.rows(); ++d) {
    for (int q = 0; q < Y.cols(); ++q) Yn(d, q) = n.norm_y(d, Y(d, q));
  }
  return Yn;
}

void flatten_grads(const std::vector<Eigen::MatrixXd>& dW,
                   const std::vector<Eigen::VectorXd>& db,
                   std::vector<double>& out) {
  for (size_t l = 0; l < dW.size(); ++l) {
    for (int i = 0; i < dW[l].rows(); ++i) {
      for (int j = 0; j < dW[l].cols(); ++j) out.push_back(dW[l](i, j));
    }
    for (int i = 0; i < db[l].size(); ++i) out.push_back(db[l](i));
  }
}

// collocation batch for the physics residuals: interior nodes with their four
// FD-shifted copies, then diagonal and xi=0 nodes
struct PhysBatch {
  Eigen::MatrixXd Y;       // raw 2 x (5*Qi + Qd + Qe)
  std::vector<double> xi_x;  // raw x of interior nodes
  std::vector<double> d_x;   // raw x of diagonal nodes
  int Qi = 0, Qd = 0, Qe = 0;
  double h = 0;  // raw FD step
};

PhysBatch build_phys_batch(const PhysicsSpec& phys, const TrainConfig& cfg) {
  PhysBatch pb;
  const int n = cfg.phys_n;
  const double L = phys.length;
  const double dg = L / (n - 1);
  pb.h = cfg.fd_step_rel * L;
  pb.Qi = n * (n + 1) / 2;
  pb.Qd = n;
  pb.Qe = n;
  pb.Y.resize(2, 5 * pb.Qi + pb.Qd + pb.Qe);
  int c = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      pb.Y(0, c) = i * dg;
      pb.Y(1, c) = j * dg;
      pb.xi_x.push_back(i * dg);
      ++c;
    }
  }
  const double shift[4][2] = {{pb.h, 0}, {-pb.h, 0}, {0, pb.h}, {0, -pb.h}};
  for (const auto& s : shift) {
    for (int q = 0; q < pb.Qi; ++q) {
      pb.Y(0, c) = pb.Y(0, q) + s[0];
      pb.Y(1, c) = pb.Y(1, q) + s[1];
      ++c;
    }
  }
  for (int i = 0; i < n; ++i) {
    pb.Y(0, c) = i * dg;
    pb.Y(1, c) = i * dg;
    pb.d_x.push_back(i * dg);
    ++c;
  }
  for (int i = 0; i < n; ++i) {
    pb.Y(0, c) = i * dg;
    pb.Y(1, c) = 0.0;
    ++c;
  }
  return pb;
}

// Accumulates the physics residual loss and its gradient with respect to the
// raw head outputs over the PhysBatch columns.  Raw is (B rows) x cols per
// head; dRaw the matching adjoint.  Residuals are nondimensionalized:
// interior ones by L/((lambda1+lambda2) * out_std), boundary ones by
// 1/out_std, so the default equal loss weights are meaningful.
double phys_residual_adjoint(const PhysBatch& pb, const PhysicsSpec& phys,
                             const TrainConfig& cfg,
                             const std::vector<double>& lambda2,
                             const Eigen::MatrixXd Raw[2], Eigen::MatrixXd dRaw[2],
                             double sigma_w, double sigma_v) {
  const int B = static_cast<int>(lambda2.size());
  const double s = cfg.minus_sign_convention ? -1.0 : 1.0;
  const double L = phys.length;
  const double inv2h = 1.0 / (2.0 * pb.h);
  const double n_res = static_cast<double>(B) * (2 * pb.Qi + pb.Qd + pb.Qe);
  const int o1 = pb.Qi, o2 = 2 * pb.Qi, o3 = 3 * pb.Qi, o4 = 4 * pb.Qi;
  const int od = 5 * pb.Qi, oe = 5 * pb.Qi + pb.Qd;

  double loss = 0.0;
  for (int b = 0; b < B; ++b) {
    const double l2 = lambda2[b];
    const double l1 = phys.lambda1_of_lambda2(l2);
    if (!(l1 > 0.0)) throw DomainError("physics family gives non-positive lambda1");
    const double a1 = L / ((l1 + l2) * sigma_w);
    const double a2 = L / ((l1 + l2) * sigma_v);
    for (int q = 0; q < pb.Qi; ++q) {
      const double kw_x = (Raw[0](b, o1 + q) - Raw[0](b, o2 + q)) * inv2h;
      const double kw_xi = (Raw[0](b, o3 + q) - Raw[0](b, o4 + q)) * inv2h;
      const double kv_x = (Raw[1](b, o1 + q) - Raw[1](b, o2 + q)) * inv2h;
      const double kv_xi = (Raw[1](b, o3 + q) - Raw[1](b, o4 + q)) * inv2h;
      const double cx = -std::exp(-pb.xi_x[q] / (phys.tau * l1)) / phys.tau;
      const double k1 = l2 * kw_x - l1 * kw_xi - cx * Raw[1](b, q);
      const double k2 = l2 * kv_x + s * l2 * kv_xi;
      loss += (k1 * a1) * (k1 * a1) + (k2 * a2) * (k2 * a2);
      const double d1 = 2.0 * k1 * a1 * a1 / n_res;
      const double d2 = 2.0 * k2 * a2 * a2 / n_res;
      dRaw[0](b, o1 + q) += d1 * l2 * inv2h;
      dRaw[0](b, o2 + q) -= d1 * l2 * inv2h;
      dRaw[0](b, o3 + q) -= d1 * l1 * inv2h;
      dRaw[0](b, o4 + q) += d1 * l1 * inv2h;
      dRaw[1](b, q) -= d1 * cx;
      dRaw[1](b, o1 + q) += d2 * l2 * inv2h;
      dRaw[1](b, o2 + q) -= d2 * l2 * inv2h;
      dRaw[1](b, o3 + q) += d2 * s * l2 * inv2h;
      dRaw[1](b, o4 + q) -= d2 * s * l2 * inv2h;
    }
    for (int q = 0; q < pb.Qd; ++q) {
      const double cx = -std::exp(-pb.d_x[q] / (phys.tau * l1)) / phys.tau;
      const double k3 = Raw[0](b, od + q) + cx / (l1 + l2);
      loss += (k3 / sigma_w) * (k3 / sigma_w);
      dRaw[0](b, od + q) += 2.0 * k3 / (sigma_w * sigma_w) / n_res;
    }
    for (int q = 0; q < pb.Qe; ++q) {
      const double k4 = Raw[1](b, oe + q) + Raw[0](b, oe + q);
      loss += (k4 / sigma_v) * (k4 / sigma_v);
      const double d4 = 2.0 * k4 / (sigma_v * sigma_v) / n_res;
      dRaw[0](b, oe + q) += d4;
      dRaw[1](b, oe + q) += d4;
    }
  }
  return loss / n_res;
}

Eigen::VectorXd flat_model_grads(const DeepOperatorModel& m,
                                 const std::vector<Eigen::MatrixXd>& dWb,
                                 const std::vector<Eigen::VectorXd>& dbb,
                                 const std::vector<Eigen::MatrixXd>& dWt,
                                 const std::vector<Eigen::VectorXd>& dbt) {
  std::vector<double> flat;
  flat.reserve(m.n_params());
  flatten_grads(dWb, dbb, flat);
  flatten_grads(dWt, dbt, flat);
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
}

}  // namespace

double no_loss_and_grad(const DeepOperatorModel& m, const OperatorDataset& ds,
                        const std::vector<int>& idx, Eigen::VectorXd* grad) {
  if (idx.empty()) throw DomainError("empty sample selection");
  const int B = static_cast<int>(idx.size());
  const int Q = ds.q();
  const int H = m.heads();
  const int p = m.p();
  const Normalization& n = m.norm();

  Eigen::MatrixXd bu(1, B);
  for (int b = 0; b < B; ++b) bu(0, b) = n.norm_u(ds.u[idx[b]]);
  const Eigen::MatrixXd Yn = normalize_queries(n, ds.Y);

  DenseNetwork::Cache bc, tc;
  const Eigen::MatrixXd bo = m.branch().forward(bu, grad ? &bc : nullptr);
  const Eigen::MatrixXd to = m.trunk().forward(Yn, grad ? &tc : nullptr);

  Eigen::MatrixXd dBo, dTo;
  if (grad) {
    dBo = Eigen::MatrixXd::Zero(bo.rows(), bo.cols());
    dTo = Eigen::MatrixXd::Zero(to.rows(), to.cols());
  }

  double loss = 0.0;
  const double denom = static_cast<double>(B) * Q * H;
  for (int h = 0; h < H; ++h) {
    Eigen::MatrixXd r = DeepOperatorModel::compose_head(bo, to, p, h);  // B x Q
    r.array() = n.out_mean[h] + n.out_std[h] * r.array();
    for (int b = 0; b < B; ++b) r.row(b) -= ds.targets[idx[b]].row(h);
    loss += r.array().square().sum();
    if (grad) {
      const Eigen::MatrixXd dDot = (2.0 * n.out_std[h] / denom) * r;
      dBo.middleRows(h * p, p).noalias() +=
          to.middleRows(h * p, p) * dDot.transpose();
      dTo.middleRows(h * p, p).noalias() +=
          bo.middleRows(h * p, p) * dDot;
    }
  }
  loss /= denom;

  if (grad) {
    std::vector<Eigen::MatrixXd> dWb, dWt;
    std::vector<Eigen::VectorXd> dbb, dbt;
    m.branch().grad_shapes(dWb, dbb);
    m.trunk().grad_shapes(dWt, dbt);
    m.branch().backward(bc, dBo, dWb, dbb);
    m.trunk().backward(tc, dTo, dWt, dbt);
    *grad = flat_model_grads(m, dWb, dbb, dWt, dbt);
  }
  return loss;
}

namespace {

double pino_physics_part(const DeepOperatorModel& m, const PhysicsSpec& phys,
                         const std::vector<double>& lambda2,
                         const TrainConfig& cfg, Eigen::VectorXd* grad) {
  if (m.heads() != 2) throw DomainError("physics loss expects two kernel heads");
  const int B = static_cast<int>(lambda2.size());
  const int p = m.p();
  const Normalization& n = m.norm();
  const PhysBatch pb = build_phys_batch(phys, cfg);

  Eigen::MatrixXd bu(1, B);
  for (int b = 0; b < B; ++b) bu(0, b) = n.norm_u(lambda2[b]);
  const Eigen::MatrixXd Yn = normalize_queries(n, pb.Y);

  DenseNetwork::Cache bc, tc;
  const Eigen::MatrixXd bo = m.branch().forward(bu, grad ? &bc : nullptr);
  const Eigen::MatrixXd to = m.trunk().forward(Yn, grad ? &tc : nullptr);

  Eigen::MatrixXd Raw[2], dRaw[2];
  for (int h = 0; h < 2; ++h) {
    Raw[h] = DeepOperatorModel::compose_head(bo, to, p, h);
    Raw[h].array() = n.out_mean[h] + n.out_std[h] * Raw[h].array();
    dRaw[h] = Eigen::MatrixXd::Zero(B, pb.Y.cols());
  }
  const double loss = phys_residual_adjoint(pb, phys, cfg, lambda2, Raw, dRaw,
                                            n.out_std[0], n.out_std[1]);
  if (grad) {
    Eigen::MatrixXd dBo = Eigen::MatrixXd::Zero(bo.rows(), bo.cols());
    Eigen::MatrixXd dTo = Eigen::MatrixXd::Zero(to.rows(), to.cols());
    for (int h = 0; h < 2; ++h) {
      const Eigen::MatrixXd dDot = n.out_std[h] * dRaw[h];
      dBo.middleRows(h * p, p).noalias() +=
          to.middleRows(h * p, p) * dDot.transpose();
      dTo.middleRows(h * p, p).noalias() += bo.middleRows(h * p, p) * dDot;
    }
    std::vector<Eigen::MatrixXd> dWb, dWt;
    std::vector<Eigen::VectorXd> dbb, dbt;
    m.branch().grad_shapes(dWb, dbb);
    m.trunk().grad_shapes(dWt, dbt);
    m.branch().backward(bc, dBo, dWb, dbb);
    m.trunk().backward(tc, dTo, dWt, dbt);
    *grad = flat_model_grads(m, dWb, dbb, dWt, dbt);
  }
  return loss;
}

}  // namespace

double pino_loss_and_grad(const DeepOperatorModel& m, const OperatorDataset& ds,
                          const PhysicsSpec& phys, const std::vector<int>& idx,
                          const TrainConfig& cfg, Eigen::VectorXd* grad,
                          double* data_part, double* physics_part) {
  Eigen::VectorXd gd, gp;
  const double data = no_loss_and_grad(m, ds, idx, grad ? &gd : nullptr);
  std::vector<double> l2s;
  for (int i : idx) l2s.push_back(ds.u[i]);
  const double physics = pino_physics_part(m, phys, l2s, cfg, grad ? &gp : nullptr);
  if (grad) *grad = cfg.w_data * gd + cfg.w_physics * gp;
  if (data_part) *data_part = data;
  if (physics_part) *physics_part = physics;
  return cfg.w_data * data + cfg.w_physics * physics;
}

double pinn_loss_and_grad(const PinnModel& m, const OperatorDataset& ds,
                          const PhysicsSpec& phys, const TrainConfig& cfg,
                          Eigen::VectorXd* grad, double* data_part,
                          double* physics_part) {
  if (ds.u.size() != 1) throw DomainError("single-instance corpus must hold one sample");
  const Normalization& n = m.norm;
  const int Q = ds.q();

  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  if (grad) m.net.grad_shapes(dW, db);

  // data term
  DenseNetwork::Cache c1;
  const Eigen::MatrixXd Yn = normalize_queries(n, ds.Y);
  Eigen::MatrixXd out = m.net.forward(Yn, grad ? &c1 : nullptr);  // 2 x Q
  double data = 0.0;
  {
    Eigen::MatrixXd r(2, Q);
    for (int h = 0; h < 2; ++h) {
      r.row(h) = (n.out_mean[h] + n.out_std[h] * out.row(h).array()).matrix() -
                 ds.targets[0].row(h);
    }
    data = r.array().square().sum() / (2.0 * Q);
    if (grad) {
      Eigen::MatrixXd dOut(2, Q);
      for (int h = 0; h < 2; ++h) {
        dOut.row(h) = (cfg.w_data * 2.0 * n.out_std[h] / (2.0 * Q)) * r.row(h);
      }
      m.net.backward(c1, dOut, dW, db);
    }
  }

  // physics term on the collocation batch
  const PhysBatch pb = build_phys_batch(phys, cfg);
  DenseNetwork::Cache c2;
  const Eigen::MatrixXd Ypn = normalize_queries(n, pb.Y);
  Eigen::MatrixXd pout = m.net.forward(Ypn, grad ? &c2 : nullptr);
  Eigen::MatrixXd Raw[2], dRaw[2];
  for (int h = 0; h < 2; ++h) {
    Raw[h] = (n.out_mean[h] + n.out_std[h] * pout.row(h).array()).matrix();
    dRaw[h] = Eigen::MatrixXd::Zero(1, pb.Y.cols());
  }
  const std::vector<double> l2s{m.lambda2};
  const double physics = phys_residual_adjoint(pb, phys, cfg, l2s, Raw, dRaw,
                                               n.out_std[0], n.out_std[1]);
  if (grad) {
    Eigen::MatrixXd dOut(2, pb.Y.cols());
    for (int h = 0; h < 2; ++h) {
      dOut.row(h) = (cfg.w_physics * n.out_std[h]) * dRaw[h].row(0);
    }
    m.net.backward(c2, dOut, dW, db);
    std::vector<double> flat;
    flat.reserve(m.net.n_params());
    flatten_grads(dW, db, flat);
    *grad = Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
  }
  if (data_part) *data_part = data;
  if (physics_part) *physics_part = physics;
  return cfg.w_data * data + cfg.w_physics * physics;
}

namespace {

// shared Adam loop; batch_loss must fill grad for the given batch indices
template <typename GetParams, typename SetParams, typename BatchLoss,
          typename TestLoss>
void run_training(const TrainConfig& cfg, const std::vector<int>& train_idx,
                  GetParams get_params, SetParams set_params, BatchLoss batch_loss,
                  TestLoss test_loss, TrainReport* report) {
  Eigen::VectorXd params = get_params();
  Adam adam(params.size());
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<int> order = train_idx;
  Eigen::VectorXd grad(params.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr * std::pow(cfg.decay_factor, epoch / cfg.decay_every);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch) {
      const size_t end = std::min(order.size(), start + cfg.batch);
      const std::vector<int> batch(order.begin() + start, order.begin() + end);
      epoch_loss += batch_loss(batch, grad);
      if (!grad.allFinite()) {
        throw ModelError("non-finite gradient at epoch " + std::to_string(epoch));
      }
      adam.step(params, grad, lr);
      set_params(params);
      ++n_batches;
    }
    if (report) {
      report->train_loss.push_back(epoch_loss / std::max(n_batches, 1));
      report->test_loss.push_back(test_loss());
    }
  }
  if (report && !report->test_loss.empty()) {
    report->final_test = report->test_loss.back();
  }
}

std::vector<int> all_or_train(const OperatorDataset& ds) {
  if (!ds.train_idx.empty()) return ds.train_idx;
  std::vector<int> all(ds.u.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

}  // namespace

DeepOperatorModel train_no(const OperatorDataset& ds, const TrainConfig& cfg,
                           TrainReport* report) {
  cfg.validate();
  ds.validate();
  DeepOperatorModel m(cfg.p, ds.heads(), static_cast<int>(ds.Y.rows()),
                      cfg.branch_hidden, cfg.trunk_hidden, fit_normalization(ds),
                      cfg.seed);
  m.set_config_hash(fnv1a(cfg.fingerprint()));
  const auto train = all_or_train(ds);
  run_training(
      cfg, train, [&] { return m.get_params(); },
      [&](const Eigen::VectorXd& p) { m.set_params(p); },
      [&](const std::vector<int>& batch, Eigen::VectorXd& grad) {
        return no_loss_and_grad(m, ds, batch, &grad);
      },
      [&] {
        return ds.test_idx.empty() ? 0.0
                                   : no_loss_and_grad(m, ds, ds.test_idx, nullptr);
      },
      report);
  return m;
}

DeepOperatorModel train_pino(const OperatorDataset& ds, const PhysicsSpec& phys,
                             const TrainConfig& cfg, TrainReport* report) {
  cfg.validate();
  ds.validate();
  DeepOperatorModel m(cfg.p, ds.heads(), static_cast<int>(ds.Y.rows()),
                      cfg.branch_hidden, cfg.trunk_hidden, fit_normalization(ds),
                      cfg.seed);
  m.set_config_hash(fnv1a(cfg.fingerprint() + ";pino"));
  const auto train = all_or_train(ds);
  double last_phys = 0.0;
  run_training(
      cfg, train, [&] { return m.get_params(); },
      [&](const Eigen::VectorXd& p) { m.set_params(p); },
      [&](const std::vector<int>& batch, Eigen::VectorXd& grad) {
        double data = 0.0, physics = 0.0;
        pino_loss_and_grad(m, ds, phys, batch, cfg, &grad, &data, &physics);
        last_phys = physics;
        return data;  // curve reports the raw-unit data MSE
      },
      [&] {
        return ds.test_idx.empty() ? 0.0
                                   : no_loss_and_grad(m, ds, ds.test_idx, nullptr);
      },
      report);
  if (report) report->physics_loss.push_back(last_phys);
  return m;
}

PinnModel train_pinn(const OperatorDataset& single_sample, const PhysicsSpec& phys,
                     const TrainConfig& cfg, TrainReport* report) {
  cfg.validate();
  single_sample.validate();
  if (single_sample.u.size() != 1) {
    throw DomainError("single-instance training expects exactly one sample");
  }
  PinnModel m;
  m.lambda2 = single_sample.u[0];
  m.seed = cfg.seed;
  m.config_hash = fnv1a(cfg.fingerprint() + ";pinn");
  m.norm = fit_normalization(single_sample);
  std::vector<int> widths{2};
  widths.insert(widths.end(), cfg.trunk_hidden.begin(), cfg.trunk_hidden.end());
  widths.push_back(2);
  std::mt19937_64 rng(cfg.seed);
  m.net = DenseNetwork(widths, rng);

  const std::vector<int> train{0};
  double last_phys = 0.0;
  run_training(
      cfg, train,
      [&] {
        std::vector<double> flat;
        flat.reserve(m.net.n_params());
        m.net.append_params(flat);
        return Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size()).eval();
      },
      [&](const Eigen::VectorXd& p) { m.net.read_params(p.data(), p.size()); },
      [&](const std::vector<int>&, Eigen::VectorXd& grad) {
        double data = 0.0, physics = 0.0;
        pinn_loss_and_grad(m, single_sample, phys, cfg, &grad, &data, &physics);
        last_phys = physics;
        return data;
      },
      [&] { return 0.0; }, report);
  if (report) report->physics_loss.push_back(last_phys);
  return m;
}

DeepOperatorModel train_control_law(const OperatorDataset& ds,
                                    const TrainConfig& cfg, TrainReport* report) {
  if (ds.heads() != 1) {
    throw DomainError("control-law corpus must have a single output head");
  }
  return train_no(ds, cfg, report);
}

}  // namespace arzlab
