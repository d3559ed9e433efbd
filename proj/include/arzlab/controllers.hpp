#pragma once

#include <string>
#include <vector>

#include "arzlab/arz_sim.hpp"
#include "arzlab/kernel_solver.hpp"

namespace arzlab {

/// Boundary control law interface: returns the actuated outlet speed
/// deviation U(t) [m/s] of v(L,t) = q(L,t)/rho* + U(t).  Controllers may
/// keep per-run internal state (reset() clears it) and may attach warnings
/// that the simulation driver collects into the result.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual double compute(double t, const TrafficState& state,
                         const Equilibrium& eq) = 0;
  virtual void reset() {}
  virtual std::string name() const = 0;

  std::vector<std::string> take_warnings() {
    auto w = std::move(warnings_);
    warnings_.clear();
    return w;
  }

 protected:
  void warn(const std::string& msg);  // deduplicated
  std::vector<std::string> warnings_;
};

class OpenLoopController final : public Controller {
 public:
  double compute(double, const TrafficState&, const Equilibrium&) override {
    return 0.0;
  }
  std::string name() const override { return "open_loop"; }
};

/// Two algebraically equivalent assemblies of the same law: directly in the
/// original (rho, v) variables with precomputed gain profiles, or through
/// the transformed states (w~, v~) and the raw edge kernels.
enum class BacksteppingAssembly { Original, Transformed };

/// Backstepping boundary feedback built from kernel values along the x = L
/// edge.  The law is assembled in flow units; the linearized
/// outlet condition converts it to the actuated speed by dividing by rho*.
/// The same class serves the exact solver and learned kernels; only the
/// source of the edge values differs.
class BacksteppingController : public Controller {
 public:
  BacksteppingController(std::vector<double> kw_edge, std::vector<double> kv_edge,
                         TriangularGrid kernel_grid, const Equilibrium& eq,
                         double tau,
                         BacksteppingAssembly assembly = BacksteppingAssembly::Original,
                         std::string name = "backstepping");
  BacksteppingController(const KernelField& kf, const Equilibrium& eq,
                         BacksteppingAssembly assembly = BacksteppingAssembly::Original,
                         std::string name = "backstepping");

  double compute(double t, const TrafficState& state, const Equilibrium& eq) override;
  std::string name() const override { return name_; }

 private:
  void resample(int n_cells);

  std::vector<double> kw_edge_, kv_edge_;
  TriangularGrid kgrid_;
  Equilibrium eq_;
  double tau_;
  BacksteppingAssembly assembly_;
  std::string name_;

  // per-grid caches, rebuilt when the state's cell count changes
  int cached_n_ = -1;
  std::vector<double> x_;                      // cell centers
  ControlGains gains_;                         // Original assembly
  std::vector<double> kw_c_, kv_c_, expf_c_;   // Transformed assembly
};

/// U_PI(t) = v* + kp (v(0,t) - v*) + ki \int (v(0,t) - v*) dt applied as the
/// absolute outlet speed, i.e. U(t) = U_PI(t) - q(L,t)/rho*.  Rectangle-rule
/// integral driven by the simulator's step times; the integral contribution
/// is clamped to +-u_max (anti-windup).
class PIController final : public Controller {
 public:
  explicit PIController(double kp = -0.5, double ki = -0.02, double u_max = 5.0);

  double compute(double t, const TrafficState& state, const Equilibrium& eq) override;
  void reset() override;
  std::string name() const override { return "pi"; }

  double kp() const { return kp_; }
  double ki() const { return ki_; }

 private:
  double kp_, ki_, u_max_;
  double integral_ = 0;  // [m], integral of the speed error
  double last_t_ = 0;
  bool started_ = false;
};

}  // namespace arzlab
