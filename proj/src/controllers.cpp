#include "arzlab/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace arzlab {

void Controller::warn(const std::string& msg) {
  if (std::find(warnings_.begin(), warnings_.end(), msg) == warnings_.end()) {
    warnings_.push_back(msg);
  }
}

BacksteppingController::BacksteppingController(std::vector<double> kw_edge,
                                               std::vector<double> kv_edge,
                                               TriangularGrid kernel_grid,
                                               const Equilibrium& eq, double tau,
                                               BacksteppingAssembly assembly,
                                               std::string name)
    : kw_edge_(std::move(kw_edge)),
      kv_edge_(std::move(kv_edge)),
      kgrid_(kernel_grid),
      eq_(eq),
      tau_(tau),
      assembly_(assembly),
      name_(std::move(name)) {
  if (static_cast<int>(kw_edge_.size()) != kgrid_.n ||
      static_cast<int>(kv_edge_.size()) != kgrid_.n) {
    throw DomainError("kernel edge arrays do not match the kernel grid");
  }
}

BacksteppingController::BacksteppingController(const KernelField& kf,
                                               const Equilibrium& eq,
                                               BacksteppingAssembly assembly,
                                               std::string name)
    : BacksteppingController(kf.kw_edge(), kf.kv_edge(), kf.grid(), eq, kf.tau(),
                             assembly, std::move(name)) {}

void BacksteppingController::resample(int n_cells) {
  const double L = kgrid_.length;
  const double dx = L / n_cells;
  x_.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) x_[i] = (i + 0.5) * dx;

  gains_ = make_control_gains(kw_edge_, kv_edge_, kgrid_, eq_, tau_, x_);

  const double v_star = eq_.lambda1;
  kw_c_.resize(n_cells);
  kv_c_.resize(n_cells);
  expf_c_.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    const double t = std::clamp(x_[i], 0.0, L) / kgrid_.h;
    const int j = std::min(static_cast<int>(t), kgrid_.n - 2);
    const double a = t - j;
    kw_c_[i] = (1 - a) * kw_edge_[j] + a * kw_edge_[j + 1];
    kv_c_[i] = (1 - a) * kv_edge_[j] + a * kv_edge_[j + 1];
    expf_c_[i] = std::exp(x_[i] / (tau_ * v_star));
  }
  cached_n_ = n_cells;
}

double BacksteppingController::compute(double, const TrafficState& state,
                                       const Equilibrium& eq) {
  const int n = static_cast<int>(state.rho.size());
  if (n != cached_n_) resample(n);
  const double dx = kgrid_.length / n;
  const double v_star = eq.v_star;
  const double d = -v_star * eq.rho_star / (eq.lambda2 + v_star);  // v*/V'(rho*)
  const double c_v = eq.rho_star + d;

  double u_flow = 0.0;
  if (assembly_ == BacksteppingAssembly::Original) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double qbar = state.rho[i] * state.v[i] - eq.q_star;
      const double vbar = state.v[i] - eq.v_star;
      acc += gains_.w_q[i] * qbar + gains_.w_v[i] * vbar;
    }
    const double qbar_l = state.rho[n - 1] * state.v[n - 1] - eq.q_star;
    const double vbar_l = state.v[n - 1] - eq.v_star;
    // trapezoid over cell centers with constant half-cell end extension
    u_flow = gains_.c_q * qbar_l + gains_.c_v * vbar_l + dx * acc;
  } else {
    const double kappa = std::exp(-kgrid_.length / (tau_ * v_star));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double qbar = state.rho[i] * state.v[i] - eq.q_star;
      const double vbar = state.v[i] - eq.v_star;
      const double wt = expf_c_[i] * (qbar - c_v * vbar);
      const double vt = -d * vbar;
      acc += kw_c_[i] * wt + kv_c_[i] * vt;
    }
    // boundary trace evaluated with the x = L exponential factor
    const double qbar_l = state.rho[n - 1] * state.v[n - 1] - eq.q_star;
    const double vbar_l = state.v[n - 1] - eq.v_star;
    const double wt_l = std::exp(kgrid_.length / (tau_ * v_star)) *
                        (qbar_l - c_v * vbar_l);
    u_flow = -kappa * wt_l + dx * acc;
  }
  // the flow-form law must be rescaled: the outlet condition actuates a speed
  return u_flow / eq.rho_star;
}

PIController::PIController(double kp, double ki, double u_max)
    : kp_(kp), ki_(ki), u_max_(u_max) {
  if (!std::isfinite(kp) || !std::isfinite(ki)) {
    throw DomainError("PI gains must be finite");
  }
}

void PIController::reset() {
  integral_ = 0;
  last_t_ = 0;
  started_ = false;
}

double PIController::compute(double t, const TrafficState& state,
                             const Equilibrium& eq) {
  const double e = state.v.front() - eq.v_star;
  if (started_) {
    integral_ += e * (t - last_t_);
  }
  started_ = true;
  last_t_ = t;
  if (ki_ != 0.0) {
    const double cap = u_max_ / std::abs(ki_);
    integral_ = std::clamp(integral_, -cap, cap);
  }
  const double u_pi = eq.v_star + kp_ * e + ki_ * integral_;
  const double q_l = state.rho.back() * state.v.back();
  return u_pi - q_l / eq.rho_star;
}

}  // namespace arzlab
