#include "arzlab/kernel_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace arzlab {

TriangularGrid::TriangularGrid(int n_, double length_) : n(n_), length(length_) {
  if (n < 3) throw DomainError("triangular grid needs at least 3 nodes per edge");
  if (!(length > 0.0)) throw DomainError("triangular grid length must be positive");
  h = length / (n - 1);
}

KernelField::KernelField(TriangularGrid grid, double lambda1, double lambda2,
                         double tau)
    : grid_(grid), lambda1_(lambda1), lambda2_(lambda2), tau_(tau) {
  kw_.assign(static_cast<size_t>(grid_.n) * grid_.n, 0.0);
  kv_.assign(static_cast<size_t>(grid_.n) * grid_.n, 0.0);
}

double KernelField::c(double x) const {
  return -std::exp(-x / (tau_ * lambda1_)) / tau_;
}

double KernelField::interp(const std::vector<double>& f, double x, double xi) const {
  const double slack = 1e-9 * grid_.length;
  if (xi < -slack || x > grid_.length + slack || xi > x + slack) {
    throw DomainError("kernel query outside the triangular domain");
  }
  x = std::clamp(x, 0.0, grid_.length);
  xi = std::clamp(xi, 0.0, x);
  int i = std::min(static_cast<int>(x / grid_.h), grid_.n - 2);
  int j = std::min(static_cast<int>(xi / grid_.h), grid_.n - 2);
  j = std::min(j, i);
  const double s = x / grid_.h - i;
  const double t = xi / grid_.h - j;
  const double f00 = f[idx(i, j)];
  const double f10 = f[idx(i + 1, j)];
  const double f11 = f[idx(i + 1, j + 1)];
  if (j < i) {
    // full square cell available
    const double f01 = f[idx(i, j + 1)];
    return (1 - s) * (1 - t) * f00 + s * (1 - t) * f10 + (1 - s) * t * f01 +
           s * t * f11;
  }
  // diagonal cell: lower triangle with vertices (i,j), (i+1,j), (i+1,j+1)
  return f00 + s * (f10 - f00) + t * (f11 - f10);
}

double KernelField::kw_interp(double x, double xi) const { return interp(kw_, x, xi); }
double KernelField::kv_interp(double x, double xi) const { return interp(kv_, x, xi); }

std::vector<double> KernelField::kw_edge() const {
  std::vector<double> e(grid_.n);
  for (int j = 0; j < grid_.n; ++j) e[j] = kw(grid_.n - 1, j);
  return e;
}

std::vector<double> KernelField::kv_edge() const {
  std::vector<double> e(grid_.n);
  for (int j = 0; j < grid_.n; ++j) e[j] = kv(grid_.n - 1, j);
  return e;
}

void KernelField::write_csv(const std::string& path) const {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path + " for writing");
  std::fprintf(fp, "#params lambda1=%.17g lambda2=%.17g tau=%.17g length=%.17g n=%d\n",
               lambda1_, lambda2_, tau_, grid_.length, grid_.n);
  std::fprintf(fp, "x,xi,kw,kv\n");
  for (int i = 0; i < grid_.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", grid_.node(i), grid_.node(j),
                   kw(i, j), kv(i, j));
    }
  }
  std::fclose(fp);
}

KernelField KernelField::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#params", 0) != 0) {
    throw IoError(path + ": missing #params header");
  }
  double l1 = 0, l2 = 0, tau = 0, length = 0;
  int n = 0;
  if (std::sscanf(line.c_str(),
                  "#params lambda1=%lg lambda2=%lg tau=%lg length=%lg n=%d", &l1,
                  &l2, &tau, &length, &n) != 5) {
    throw IoError(path + ": malformed #params header");
  }
  if (!std::getline(in, line)) throw IoError(path + ": truncated file");
  KernelField kf(TriangularGrid(n, length), l1, l2, tau);
  const double h = kf.grid().h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, xi, w, v;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &x, &xi, &w, &v) != 4) {
      throw IoError(path + ": malformed row: " + line);
    }
    const int i = static_cast<int>(std::lround(x / h));
    const int j = static_cast<int>(std::lround(xi / h));
    if (i < 0 || i >= n || j < 0 || j > i) throw IoError(path + ": node off grid");
    kf.kw(i, j) = w;
    kf.kv(i, j) = v;
  }
  return kf;
}

KernelField solve_kernels(const Equilibrium& eq, double tau, double length, int n) {
  if (!(eq.lambda1 > 0.0 && eq.lambda2 > 0.0)) {
    throw RegimeError("kernel equations require positive characteristic speeds");
  }
  if (!(tau > 0.0)) throw DomainError("relaxation time must be positive");
  const double l1 = eq.lambda1;
  const double l2 = eq.lambda2;
  KernelField kf(TriangularGrid(n, length), l1, l2, tau);
  const TriangularGrid& g = kf.grid();
  const double h = g.h;
  const double ds = h / (l1 + l2);  // characteristic arc step per h of x - xi

  auto diag = [&](double x) { return -kf.c(x) / (l1 + l2); };

  // K^w(x_i, 0) marched in increasing x; K^v(x, xi) = -kw0[(x - xi)/h].
  std::vector<double> kw0(n, 0.0);
  kw0[0] = diag(0.0);

  // Integrates the source along the backward characteristic through
  // (x_i, xi_j).  Quadrature nodes are chosen so the K^v lookups land
  // exactly on the xi = 0 grid values kw0[0..m].
  auto integrate = [&](int i, int j, bool solve_implicit) {
    const double x = g.node(i);
    const double xi = g.node(j);
    const double xd = (l1 * x + l2 * xi) / (l1 + l2);  // diagonal foot
    const int m = i - j;
    double value = diag(xd);
    if (m == 0) return value;
    double acc = 0.0;
    for (int k = 0; k <= m; ++k) {
      if (solve_implicit && k == m) break;  // unknown endpoint handled below
      const double xk = xd + l2 * (k * h) / (l1 + l2);
      const double f = kf.c(xk) * (-kw0[k]);
      acc += (k == 0 || k == m) ? 0.5 * f : f;
    }
    value += ds * acc;
    if (solve_implicit) {
      // endpoint term -0.5*ds*c(x)*kw0[m] with kw0[m] the value being solved
      value /= 1.0 + 0.5 * ds * kf.c(x);
    }
    return value;
  };

  for (int i = 1; i < n; ++i) kw0[i] = integrate(i, 0, true);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      kf.kw(i, j) = (j == 0) ? kw0[i] : integrate(i, j, false);
      kf.kv(i, j) = -kw0[i - j];
    }
  }
  return kf;
}

KernelResiduals kernel_residuals(const KernelField& kf, bool minus_sign_convention) {
  const TriangularGrid& g = kf.grid();
  const int n = g.n;
  if (n < 3) throw DomainError("residual evaluation needs n >= 3");
  const double h = g.h;
  const double l1 = kf.lambda1();
  const double l2 = kf.lambda2();
  const double sv = minus_sign_convention ? -1.0 : 1.0;

  KernelResiduals r;
  for (int i = 1; i <= n - 2; ++i) {
    for (int j = 1; j <= i - 1; ++j) {
      const double kw_x = (kf.kw(i + 1, j) - kf.kw(i - 1, j)) / (2 * h);
      const double kw_xi = (kf.kw(i, j + 1) - kf.kw(i, j - 1)) / (2 * h);
      const double kv_x = (kf.kv(i + 1, j) - kf.kv(i - 1, j)) / (2 * h);
      const double kv_xi = (kf.kv(i, j + 1) - kf.kv(i, j - 1)) / (2 * h);
      r.interior_w.push_back(l2 * kw_x - l1 * kw_xi - kf.c(g.node(i)) * kf.kv(i, j));
      r.interior_v.push_back(l2 * kv_x + sv * l2 * kv_xi);
    }
  }
  for (int i = 0; i < n; ++i) {
    r.diagonal.push_back(kf.kw(i, i) + kf.c(g.node(i)) / (l1 + l2));
    r.edge.push_back(kf.kv(i, 0) + kf.kw(i, 0));
  }
  return r;
}

namespace {
double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
double mean_abs(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s / v.size();
}
}  // namespace

double KernelResiduals::max_interior() const {
  return std::max(max_abs(interior_w), max_abs(interior_v));
}
double KernelResiduals::max_boundary() const {
  return std::max(max_abs(diagonal), max_abs(edge));
}
double KernelResiduals::mean_interior() const {
  return 0.5 * (mean_abs(interior_w) + mean_abs(interior_v));
}

namespace {
double lerp_edge(std::span<const double> f, const TriangularGrid& g, double xi) {
  const double t = std::clamp(xi, 0.0, g.length) / g.h;
  const int j = std::min(static_cast<int>(t), g.n - 2);
  const double a = t - j;
  return (1 - a) * f[j] + a * f[j + 1];
}
}  // namespace

ControlGains make_control_gains(std::span<const double> kw_edge,
                                std::span<const double> kv_edge,
                                const TriangularGrid& grid, const Equilibrium& eq,
                                double tau, std::span<const double> xi_out) {
  const double v_star = eq.lambda1;
  // v*/V'(rho*) expressed through the characteristic speeds
  const double d = -v_star * eq.rho_star / (eq.lambda2 + v_star);
  ControlGains gains;
  gains.c_q = -1.0;
  gains.c_v = eq.rho_star + d;
  gains.xi.assign(xi_out.begin(), xi_out.end());
  gains.w_q.resize(xi_out.size());
  gains.w_v.resize(xi_out.size());
  for (size_t i = 0; i < xi_out.size(); ++i) {
    const double xi = xi_out[i];
    const double e = std::exp(xi / (tau * v_star));
    const double kw = lerp_edge(kw_edge, grid, xi);
    const double kv = lerp_edge(kv_edge, grid, xi);
    gains.w_q[i] = e * kw;
    gains.w_v[i] = -(d * kv + gains.c_v * e * kw);
  }
  return gains;
}

ControlGains control_gains_original(const KernelField& kf, const Equilibrium& eq,
                                    double tau, std::span<const double> xi_out) {
  const auto kw = kf.kw_edge();
  const auto kv = kf.kv_edge();
  return make_control_gains(kw, kv, kf.grid(), eq, tau, xi_out);
}

}  // namespace arzlab
