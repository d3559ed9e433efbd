#pragma once

namespace arzlab::units {

// All library internals are SI: m, s, veh/m, veh/s.  Files and the CLI speak
// km/h, veh/km, veh/h and convert at the boundary.

constexpr double kmh_to_mps(double v) { return v / 3.6; }
constexpr double mps_to_kmh(double v) { return v * 3.6; }

constexpr double vehkm_to_vehm(double rho) { return rho / 1000.0; }
constexpr double vehm_to_vehkm(double rho) { return rho * 1000.0; }

constexpr double vehh_to_vehs(double q) { return q / 3600.0; }
constexpr double vehs_to_vehh(double q) { return q * 3600.0; }

}  // namespace arzlab::units
