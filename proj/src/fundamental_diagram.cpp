#include "arzlab/fundamental_diagram.hpp"

#include <cmath>
#include <string>

namespace arzlab {

double FundamentalDiagram::velocity(double rho) const {
  if (!(rho >= 0.0 && rho <= rho_max())) {
    throw DomainError("density " + std::to_string(rho) + " veh/m outside [0, " +
                      std::to_string(rho_max()) + "]");
  }
  return velocity_raw(rho);
}

double FundamentalDiagram::velocity_derivative(double rho) const {
  if (!(rho > 0.0 && rho < rho_max())) {
    throw DomainError("density " + std::to_string(rho) +
                      " veh/m outside (0, rho_max) for V'");
  }
  return velocity_derivative_raw(rho);
}

double FundamentalDiagram::critical_density() const {
  const double rm = rho_max();
  double lo = 1e-9 * rm;
  double hi = (1.0 - 1e-9) * rm;
  double flo = flow_derivative(lo);
  double fhi = flow_derivative(hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    throw ModelError("flow derivative does not change sign on (0, rho_max)");
  }
  // bisection to 1e-10 relative width
  while ((hi - lo) > 1e-10 * rm) {
    const double mid = 0.5 * (lo + hi);
    if (flow_derivative(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool FundamentalDiagram::flow_is_concave(int n_samples) const {
  const double rm = rho_max();
  const double h = rm / (n_samples + 1);
  for (int i = 1; i <= n_samples - 1; ++i) {
    const double rho = i * h;
    const double d2 = flow(rho + h) - 2.0 * flow(rho) + flow(rho - h);
    if (!(d2 < 0.0)) return false;
  }
  return true;
}

GreenshieldsFD::GreenshieldsFD(double v_f, double rho_m, double gamma)
    : v_f_(v_f), rho_m_(rho_m), gamma_(gamma) {
  if (!(v_f > 0.0)) throw DomainError("free-flow speed must be positive");
  if (!(rho_m > 0.0)) throw DomainError("maximum density must be positive");
  if (!(gamma > 0.0)) throw DomainError("exponent must be positive");
}

double GreenshieldsFD::velocity_raw(double rho) const {
  const double r = rho / rho_m_;
  if (gamma_ == 1.0) return v_f_ * (1.0 - r);
  if (gamma_ == 2.0) return v_f_ * (1.0 - r * r);
  return v_f_ * (1.0 - std::pow(r, gamma_));
}

double GreenshieldsFD::velocity_derivative_raw(double rho) const {
  const double r = rho / rho_m_;
  if (gamma_ == 1.0) return -v_f_ / rho_m_;
  if (gamma_ == 2.0) return -2.0 * v_f_ * r / rho_m_;
  return -gamma_ * v_f_ * std::pow(r, gamma_ - 1.0) / rho_m_;
}

ThreeParamFD::ThreeParamFD(double zeta, double kappa, double p, double rho_m)
    : zeta_(zeta), kappa_(kappa), p_(p), rho_m_(rho_m) {
  if (!(zeta > 0.0)) throw DomainError("zeta must be positive");
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  if (!(rho_m > 0.0)) throw DomainError("maximum density must be positive");
  a_ = std::sqrt(1.0 + kappa_ * kappa_ * p_ * p_);
  b_ = std::sqrt(1.0 + kappa_ * kappa_ * (1.0 - p_) * (1.0 - p_));
  q0_ = 0.0;
  q0_ = flow_raw(0.0);
}

double ThreeParamFD::flow_raw(double rho) const {
  const double u = rho / rho_m_ - p_;
  return zeta_ * (a_ + (b_ - a_) * rho / rho_m_ -
                  std::sqrt(1.0 + kappa_ * kappa_ * u * u)) -
         q0_;
}

double ThreeParamFD::flow_derivative_raw(double rho) const {
  const double u = rho / rho_m_ - p_;
  return zeta_ / rho_m_ *
         ((b_ - a_) - kappa_ * kappa_ * u / std::sqrt(1.0 + kappa_ * kappa_ * u * u));
}

double ThreeParamFD::velocity_raw(double rho) const {
  if (rho < 1e-9 * rho_m_) return flow_derivative_raw(0.0);  // rho -> 0 limit
  return flow_raw(rho) / rho;
}

double ThreeParamFD::velocity_derivative_raw(double rho) const {
  if (rho < 1e-9 * rho_m_) {
    // V'(0) = Q''(0)/2
    const double u = -p_;
    const double s = std::sqrt(1.0 + kappa_ * kappa_ * u * u);
    return -0.5 * zeta_ * kappa_ * kappa_ / (rho_m_ * rho_m_ * s * s * s);
  }
  return (flow_derivative_raw(rho) * rho - flow_raw(rho)) / (rho * rho);
}

Equilibrium equilibrium_from_density(const FundamentalDiagram& fd, double rho_star) {
  const double rho_c = fd.critical_density();
  // rho_c comes from a bisection; a strict comparison would let the degenerate
  // boundary point (lambda2 = 0) slip through on last-bit rounding
  if (!(rho_star > rho_c * (1.0 + 1e-9))) {
    throw RegimeError("equilibrium density " + std::to_string(rho_star) +
                      " veh/m is not above the critical density " +
                      std::to_string(rho_c) + " veh/m");
  }
  Equilibrium eq;
  eq.rho_star = rho_star;
  eq.v_star = fd.velocity(rho_star);
  eq.q_star = rho_star * eq.v_star;
  eq.lambda1 = eq.v_star;
  eq.lambda2 = -rho_star * fd.velocity_derivative(rho_star) - eq.v_star;
  if (!(eq.lambda2 > 0.0)) {
    throw RegimeError("second characteristic speed is not positive");
  }
  return eq;
}

}  // namespace arzlab
