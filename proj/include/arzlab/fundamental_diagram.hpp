#pragma once

#include <memory>

#include "arzlab/errors.hpp"

namespace arzlab {

/// Density-speed relation V(rho) with analytic derivative.  Flow is
/// Q(rho) = rho * V(rho) and must be strictly concave on (0, rho_max)
/// for the congested/free regime split to make sense.
class FundamentalDiagram {
 public:
  virtual ~FundamentalDiagram() = default;

  /// V(rho) [m/s].  Throws DomainError outside [0, rho_max].
  double velocity(double rho) const;
  /// dV/drho [(m/s)/(veh/m)].  Throws DomainError outside (0, rho_max).
  double velocity_derivative(double rho) const;

  /// Unchecked evaluations for hot loops (time integrator).
  virtual double velocity_raw(double rho) const = 0;
  virtual double velocity_derivative_raw(double rho) const = 0;

  virtual double rho_max() const = 0;
  virtual std::unique_ptr<FundamentalDiagram> clone() const = 0;

  double flow(double rho) const { return rho * velocity_raw(rho); }
  double flow_derivative(double rho) const {
    return velocity_raw(rho) + rho * velocity_derivative_raw(rho);
  }

  /// Root of Q'(rho) on (0, rho_max), bisection to 1e-10 relative tolerance.
  /// Throws ModelError if Q' does not change sign (non-concave model).
  double critical_density() const;

  /// Numerical strict-concavity check of Q on an n-point sample grid.
  bool flow_is_concave(int n_samples = 256) const;
};

/// V(rho) = v_f * (1 - (rho/rho_m)^gamma).
class GreenshieldsFD final : public FundamentalDiagram {
 public:
  GreenshieldsFD(double v_f, double rho_m, double gamma);

  double velocity_raw(double rho) const override;
  double velocity_derivative_raw(double rho) const override;
  double rho_max() const override { return rho_m_; }
  std::unique_ptr<FundamentalDiagram> clone() const override {
    return std::make_unique<GreenshieldsFD>(*this);
  }

  double v_free() const { return v_f_; }
  double gamma() const { return gamma_; }

 private:
  double v_f_;
  double rho_m_;
  double gamma_;
};

/// Flow-based diagram
///   Q(rho) = zeta * (a + (b-a)*rho/rho_m - sqrt(1 + kappa^2 (rho/rho_m - p)^2))
/// with a = sqrt(1 + kappa^2 p^2), b = sqrt(1 + kappa^2 (1-p)^2).
/// Analytically Q(0) = 0; the numerically evaluated offset is subtracted so
/// that zero density maps to exactly zero flow.
class ThreeParamFD final : public FundamentalDiagram {
 public:
  /// zeta in veh/s, rho_m in veh/m; kappa, p dimensionless.
  ThreeParamFD(double zeta, double kappa, double p, double rho_m);

  double velocity_raw(double rho) const override;
  double velocity_derivative_raw(double rho) const override;
  double rho_max() const override { return rho_m_; }
  std::unique_ptr<FundamentalDiagram> clone() const override {
    return std::make_unique<ThreeParamFD>(*this);
  }

  double flow_raw(double rho) const;             // Q(rho), offset-corrected
  double flow_derivative_raw(double rho) const;  // Q'(rho)

  double zeta() const { return zeta_; }
  double kappa() const { return kappa_; }
  double p() const { return p_; }

 private:
  double zeta_;
  double kappa_;
  double p_;
  double rho_m_;
  double a_;  // recomputed from kappa, p at construction
  double b_;
  double q0_;  // numerical Q(0) offset, subtracted from all evaluations
};

/// Congested operating point with the two characteristic speeds of the
/// linearized traffic system.
struct Equilibrium {
  double rho_star = 0;  // veh/m
  double v_star = 0;    // m/s
  double q_star = 0;    // veh/s
  double lambda1 = 0;   // m/s, = v_star
  double lambda2 = 0;   // m/s, = -rho_star V'(rho_star) - v_star, > 0 in congestion
};

/// Builds the Equilibrium at rho_star.  Requires rho_star strictly above the
/// critical density (congested regime); throws RegimeError otherwise.
Equilibrium equilibrium_from_density(const FundamentalDiagram& fd, double rho_star);

}  // namespace arzlab
