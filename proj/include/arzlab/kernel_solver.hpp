#pragma once

#include <span>
#include <string>
#include <vector>

#include "arzlab/fundamental_diagram.hpp"

namespace arzlab {

/// Uniform node grid on the triangle T = {0 <= xi <= x <= L}: n nodes per
/// edge at spacing h = L/(n-1).
struct TriangularGrid {
  int n = 0;
  double length = 0;
  double h = 0;

  TriangularGrid() = default;
  TriangularGrid(int n_, double length_);
  double node(int i) const { return i * h; }
  int n_nodes() const { return n * (n + 1) / 2; }
};

/// The transformation-kernel pair (K^w, K^v) sampled on a TriangularGrid,
/// together with the parameters it was solved for.
class KernelField {
 public:
  KernelField() = default;
  KernelField(TriangularGrid grid, double lambda1, double lambda2, double tau);

  const TriangularGrid& grid() const { return grid_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  double tau() const { return tau_; }
  double length() const { return grid_.length; }

  /// In-domain source coefficient of the coupled transport equations.
  double c(double x) const;

  double kw(int i, int j) const { return kw_[idx(i, j)]; }
  double kv(int i, int j) const { return kv_[idx(i, j)]; }
  double& kw(int i, int j) { return kw_[idx(i, j)]; }
  double& kv(int i, int j) { return kv_[idx(i, j)]; }

  /// Linear interpolation at an arbitrary point of T (never extrapolates;
  /// throws DomainError outside the triangle up to rounding slack).
  double kw_interp(double x, double xi) const;
  double kv_interp(double x, double xi) const;

  /// Values along the x = L edge at the grid nodes xi_j.
  std::vector<double> kw_edge() const;
  std::vector<double> kv_edge() const;

  void write_csv(const std::string& path) const;
  static KernelField read_csv(const std::string& path);

 private:
  int idx(int i, int j) const { return i * grid_.n + j; }
  double interp(const std::vector<double>& f, double x, double xi) const;

  TriangularGrid grid_;
  double lambda1_ = 0, lambda2_ = 0, tau_ = 0;
  std::vector<double> kw_, kv_;  // row-major n*n, valid for j <= i
};

/// Solves the kernel transport system on the triangle by marching along
/// characteristics.  K^v is constant on lines x - xi = const and anchored to
/// -K^w(., 0); K^w is integrated from its diagonal data with the in-domain
/// source accumulated by trapezoidal quadrature.  Boundary data are exact at
/// the grid nodes by construction.
KernelField solve_kernels(const Equilibrium& eq, double tau, double length, int n);

/// Pointwise defect of the solved (or learned) kernels against the transport
/// system: two interior equation residuals (central differences) and the two
/// boundary residuals.
struct KernelResiduals {
  std::vector<double> interior_w;  // transport defect of K^w at interior nodes
  std::vector<double> interior_v;  // transport defect of K^v at interior nodes
  std::vector<double> diagonal;    // K^w(x,x) + c(x)/(l1+l2) at diagonal nodes
  std::vector<double> edge;        // K^v(x,0) + K^w(x,0) at xi = 0 nodes

  double max_interior() const;
  double max_boundary() const;
  double mean_interior() const;
};

/// `minus_sign_convention` flips the sign of the xi-derivative in the K^v
/// residual (the alternative convention some formulations use).
KernelResiduals kernel_residuals(const KernelField& kf,
                                 bool minus_sign_convention = false);

/// Quadrature weights of the boundary control law in original (rho, v)
/// coordinates, resampled onto the sample locations `xi`:
///   U = c_q*(rho_L v_L - q*) + c_v*(v_L - v*)
///       + integral[ w_q*(q - q*) + w_v*(v - v*) ] dxi.
struct ControlGains {
  std::vector<double> xi;
  std::vector<double> w_q;
  std::vector<double> w_v;
  double c_q = -1.0;
  double c_v = 0.0;  // rho* + v*/V'(rho*)
};

/// Builds ControlGains from kernel values on the x = L edge (at the kernel
/// grid nodes), linearly resampled to `xi_out`.
ControlGains make_control_gains(std::span<const double> kw_edge,
                                std::span<const double> kv_edge,
                                const TriangularGrid& grid, const Equilibrium& eq,
                                double tau, std::span<const double> xi_out);

ControlGains control_gains_original(const KernelField& kf, const Equilibrium& eq,
                                    double tau, std::span<const double> xi_out);

}  // namespace arzlab
