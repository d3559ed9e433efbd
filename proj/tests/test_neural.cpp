#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "arzlab/operator_controllers.hpp"
#include "arzlab/training.hpp"

using namespace arzlab;
namespace fs = std::filesystem;

namespace {

/// quadratic data loss of a network on a fixed batch, with analytic gradient
double net_loss(DenseNetwork& net, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& target, Eigen::VectorXd* grad) {
  DenseNetwork::Cache cache;
  const Eigen::MatrixXd y = net.forward(x, &cache);
  const Eigen::MatrixXd d = y - target;
  if (grad) {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
    net.grad_shapes(dW, db);
    net.backward(cache, d / x.cols(), dW, db);
    std::vector<double> flat;
    for (size_t l = 0; l < dW.size(); ++l) {
      for (int r = 0; r < dW[l].rows(); ++r)
        for (int c = 0; c < dW[l].cols(); ++c) flat.push_back(dW[l](r, c));
      for (int r = 0; r < db[l].size(); ++r) flat.push_back(db[l](r));
    }
    *grad = Eigen::Map<Eigen::VectorXd>(flat.data(), flat.size());
  }
  return 0.5 * d.squaredNorm() / x.cols();
}

OperatorDataset tiny_kernel_dataset(int n_samples, uint64_t seed) {
  OperatorDataset ds;
  const int q = 15;
  ds.Y.resize(2, q);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0, 500);
  for (int k = 0; k < q; ++k) {
    const double x = ux(rng);
    std::uniform_real_distribution<double> uxi(0, x);
    ds.Y(0, k) = x;
    ds.Y(1, k) = uxi(rng);
  }
  for (int i = 0; i < n_samples; ++i) {
    const double lam2 = 5.0 + 20.0 * i / std::max(1, n_samples - 1);
    Eigen::MatrixXd t(2, q);
    for (int k = 0; k < q; ++k) {
      t(0, k) = 1e-3 * std::sin(ds.Y(0, k) / 100.0 + lam2 / 10);
      t(1, k) = -1e-3 * std::cos(ds.Y(1, k) / 100.0 - lam2 / 10);
    }
    ds.u.push_back(lam2);
    ds.targets.push_back(t);
    ds.train_idx.push_back(i);
  }
  return ds;
}

}  // namespace

TEST_CASE("dense network gradients match finite differences") {
  std::mt19937_64 rng(17);
  DenseNetwork net({3, 8, 8, 2}, rng);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(3, 5), target(2, 5);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
  for (int i = 0; i < target.size(); ++i) target.data()[i] = nd(rng);

  Eigen::VectorXd grad;
  net_loss(net, x, target, &grad);
  std::vector<double> flat;
  net.append_params(flat);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(flat.size()) - 1);
  for (int k = 0; k < 25; ++k) {
    const int j = pick(rng);
    const double h = 1e-6;
    std::vector<double> fp = flat;
    fp[j] += h;
    net.read_params(fp.data(), fp.size());
    const double lp = net_loss(net, x, target, nullptr);
    fp[j] -= 2 * h;
    net.read_params(fp.data(), fp.size());
    const double lm = net_loss(net, x, target, nullptr);
    net.read_params(flat.data(), flat.size());
    const double fd = (lp - lm) / (2 * h);
    CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("Adam minimizes a quadratic") {
  Eigen::VectorXd p(4);
  p << 3, -2, 1, 5;
  Adam opt(4);
  for (int k = 0; k < 4000; ++k) {
    const Eigen::VectorXd g = 2.0 * p;
    opt.step(p, g, 1e-2);
  }
  CHECK(p.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("single-basis model degenerates to its trunk") {
  Normalization norm;
  norm.u_lo = 0;
  norm.u_hi = 10;
  norm.y_lo = {0.0, 0.0};
  norm.y_hi = {1.0, 1.0};
  norm.out_mean = {0.5};
  norm.out_std = {2.0};
  DeepOperatorModel m(1, 1, 2, {4}, {4}, norm, 42);
  // silence the branch: all zeros except the final bias = 1
  Eigen::VectorXd p = Eigen::VectorXd::Zero(m.n_params());
  const size_t nb = m.branch().n_params();
  p[nb - 1] = 1.0;  // last branch parameter is the final layer bias
  // give the trunk a deterministic nonzero parameterization
  for (size_t i = nb; i < static_cast<size_t>(p.size()); ++i)
    p[i] = 0.1 * std::sin(static_cast<double>(i));
  m.set_params(p);

  Eigen::MatrixXd Y(2, 3);
  Y << 0.1, 0.4, 0.9, 0.0, 0.5, 0.8;
  const Eigen::MatrixXd out = m.predict(5.0, Y);
  // reference: trunk forward on the normalized queries
  Eigen::MatrixXd Yn(2, 3);
  for (int d = 0; d < 2; ++d)
    for (int q = 0; q < 3; ++q) Yn(d, q) = m.norm().norm_y(d, Y(d, q));
  const Eigen::MatrixXd ref = m.trunk().forward(Yn);
  for (int q = 0; q < 3; ++q) {
    CHECK(out(0, q) == doctest::Approx(0.5 + 2.0 * ref(0, q)).epsilon(1e-12));
  }
}

TEST_CASE("zero-padded extra basis slices do not change the prediction") {
  Normalization norm;
  norm.u_lo = 0;
  norm.u_hi = 10;
  norm.y_lo = {0.0};
  norm.y_hi = {1.0};
  norm.out_mean = {0.0};
  norm.out_std = {1.0};
  DeepOperatorModel m1(1, 1, 1, {4}, {4}, norm, 7);
  DeepOperatorModel m2(2, 1, 1, {4}, {4}, norm, 7);
  // copy m1 into the first slice of m2, zero the second slice
  const Eigen::VectorXd p1 = m1.get_params();
  Eigen::VectorXd p2 = Eigen::VectorXd::Zero(m2.n_params());
  // branch layout: W0(4x1) b0(4) W1(p x 4) b1(p); trunk identical shapes
  auto copy_net = [](const Eigen::VectorXd& src, int s_off, Eigen::VectorXd& dst,
                     int d_off) {
    for (int k = 0; k < 8; ++k) dst[d_off + k] = src[s_off + k];  // W0, b0
    for (int k = 0; k < 4; ++k) dst[d_off + 8 + k] = src[s_off + 8 + k];  // W1 row 0
    dst[d_off + 16] = src[s_off + 12];  // b1 row 0 (row 1 stays zero)
  };
  copy_net(p1, 0, p2, 0);                       // branch (13 -> 18 params)
  copy_net(p1, 13, p2, 18);                     // trunk
  m2.set_params(p2);
  Eigen::MatrixXd Y(1, 4);
  Y << 0.1, 0.3, 0.6, 1.0;
  const Eigen::MatrixXd a = m1.predict(3.0, Y);
  const Eigen::MatrixXd b = m2.predict(3.0, Y);
  for (int q = 0; q < 4; ++q) CHECK(a(0, q) == doctest::Approx(b(0, q)).epsilon(1e-13));
}

TEST_CASE("data loss is zero with zero gradient at an exact fit") {
  OperatorDataset ds = tiny_kernel_dataset(3, 5);
  TrainConfig tc;
  tc.p = 4;
  tc.branch_hidden = {8};
  tc.trunk_hidden = {8};
  DeepOperatorModel m(tc.p, 2, 2, tc.branch_hidden, tc.trunk_hidden,
                      fit_normalization(ds), 1);
  // overwrite the targets with the model's own predictions
  for (size_t i = 0; i < ds.u.size(); ++i) ds.targets[i] = m.predict(ds.u[i], ds.Y);
  Eigen::VectorXd grad;
  const double loss = no_loss_and_grad(m, ds, ds.train_idx, &grad);
  CHECK(loss < 1e-24);
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a single sample is memorized") {
  const OperatorDataset ds = tiny_kernel_dataset(1, 9);
  TrainConfig tc;
  tc.epochs = 3000;
  tc.p = 8;
  tc.branch_hidden = {16};
  tc.trunk_hidden = {16, 16};
  tc.lr = 1e-3;
  tc.decay_every = 1000;
  TrainReport rep;
  const DeepOperatorModel m = train_no(ds, tc, &rep);
  CHECK(rep.train_loss.back() < 1e-8);
}

TEST_CASE("training reduces the loss over the first 50 epochs") {
  const OperatorDataset ds = tiny_kernel_dataset(40, 3);
  TrainConfig tc;
  tc.epochs = 50;
  tc.p = 8;
  tc.branch_hidden = {16, 16};
  tc.trunk_hidden = {16, 16};
  TrainReport rep;
  train_no(ds, tc, &rep);
  REQUIRE(rep.train_loss.size() == 50);
  CHECK(rep.train_loss.back() < rep.train_loss.front());
}

TEST_CASE("training is seed-deterministic") {
  const OperatorDataset ds = tiny_kernel_dataset(10, 3);
  TrainConfig tc;
  tc.epochs = 30;
  tc.p = 4;
  tc.branch_hidden = {8};
  tc.trunk_hidden = {8};
  const DeepOperatorModel a = train_no(ds, tc);
  const DeepOperatorModel b = train_no(ds, tc);
  CHECK(a.get_params() == b.get_params());
}

TEST_CASE("model container round trip is bit-exact") {
  const OperatorDataset ds = tiny_kernel_dataset(5, 21);
  TrainConfig tc;
  tc.epochs = 10;
  tc.p = 4;
  tc.branch_hidden = {8};
  tc.trunk_hidden = {8};
  const DeepOperatorModel m = train_no(ds, tc);
  const auto path = (fs::temp_directory_path() / "arzlab_model_rt.bin").string();
  save_model(m, path);
  CHECK(model_kind(path) == "deeponet");
  const DeepOperatorModel m2 = load_model(path);
  CHECK(m.get_params() == m2.get_params());
  CHECK(m.seed() == m2.seed());
  CHECK(m.config_hash() == m2.config_hash());
  CHECK(m.norm().u_lo == m2.norm().u_lo);
  CHECK(m.norm().out_std == m2.norm().out_std);
  // predictions identical
  Eigen::MatrixXd Y(2, 2);
  Y << 10, 400, 5, 100;
  CHECK(m.predict(ds.u[2], Y) == m2.predict(ds.u[2], Y));

  // truncation must be detected
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  in.close();
  const auto tpath = (fs::temp_directory_path() / "arzlab_model_tr.bin").string();
  std::ofstream out(tpath, std::ios::binary);
  out.write(bytes.data(), static_cast<long>(bytes.size() / 2));
  out.close();
  CHECK_THROWS_AS(load_model(tpath), IoError);
  CHECK_THROWS_AS(load_pinn_model(path), IoError);  // wrong container kind
  fs::remove(path);
  fs::remove(tpath);
}

TEST_CASE("operator model rejects unnormalized-looking inputs") {
  const OperatorDataset ds = tiny_kernel_dataset(5, 21);
  const Normalization norm = fit_normalization(ds);
  DeepOperatorModel m(4, 2, 2, {8}, {8}, norm, 1);
  Eigen::MatrixXd Y(2, 1);
  Y << 10, 5;
  CHECK_THROWS_AS(m.predict(999.0, Y), DomainError);
  Eigen::MatrixXd bad(3, 1);
  bad << 1, 2, 3;
  CHECK_THROWS_AS(m.predict(ds.u[0], bad), DomainError);
}

TEST_CASE("single-instance model refuses a different wave speed") {
  PinnModel pm;
  pm.lambda2 = 20.0;
  pm.norm.y_lo = {0.0, 0.0};
  pm.norm.y_hi = {500.0, 500.0};
  pm.norm.out_mean = {0.0, 0.0};
  pm.norm.out_std = {1.0, 1.0};
  std::mt19937_64 rng(3);
  pm.net = DenseNetwork({2, 8, 2}, rng);
  Eigen::MatrixXd Y(2, 1);
  Y << 100, 50;
  CHECK_NOTHROW(pm.predict(20.0, Y));
  CHECK_THROWS_AS(pm.predict(21.0, Y), ModelError);
}

TEST_CASE("a zero control corpus trains to a silent control law") {
  OperatorDataset ds;
  const int q = 31;
  ds.Y.resize(1, q);
  for (int k = 0; k < q; ++k) ds.Y(0, k) = 10.0 * k;
  for (int i = 0; i < 8; ++i) {
    ds.u.push_back(18.0 + i);
    ds.targets.push_back(Eigen::MatrixXd::Zero(1, q));
    ds.train_idx.push_back(i);
  }
  TrainConfig tc;
  tc.epochs = 1000;
  tc.lr = 1e-3;
  tc.decay_every = 400;
  tc.p = 4;
  tc.branch_hidden = {8};
  tc.trunk_hidden = {8};
  const DeepOperatorModel m = train_control_law(ds, tc);
  NoControlLawController ctl(m);
  TrafficState st;
  st.rho = {0.12};
  st.v = {10.0};
  Equilibrium eq;
  eq.lambda2 = 20.0;
  CHECK(std::abs(ctl.compute(100.0, st, eq)) < 1e-3);
  // beyond the training horizon the value is held and a warning attached
  const double held = ctl.compute(1000.0, st, eq);
  CHECK(held == ctl.compute(300.0, st, eq));
  CHECK(!ctl.take_warnings().empty());
}
