#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>

#include "dcm/core.hpp"

namespace dcm {

inline constexpr double kw_per_mw = 1000.0;

// Discharge-only battery, full at the start of each day.
struct BessSpec {
  double power_max = 10.0;    // MW
  double energy_max = 20.0;   // MWh
  double energy_min = 0.0;    // MWh
  double discharge_efficiency = 0.95;

  double usable_energy() const { return energy_max - energy_min; }

  void validate() const {
    if (!(power_max > 0.0)) throw std::invalid_argument("bess power_max must be > 0");
    if (!(energy_min >= 0.0 && energy_min < energy_max))
      throw std::invalid_argument("bess requires 0 <= energy_min < energy_max");
    if (!(discharge_efficiency > 0.0 && discharge_efficiency <= 1.0))
      throw std::invalid_argument("bess efficiency must be in (0,1]");
  }
};

struct BessState {
  double energy = 0.0;  // MWh

  static BessState full(const BessSpec& spec) { return {spec.energy_max}; }
};

struct DgSpec {
  double power_max = 40.0;     // MW
  double fuel_cost = 0.245;    // $/kWh
  double energy_price = 0.03;  // $/kWh credited for energy not purchased

  // Net cost per MWh generated.
  double net_cost_per_mwh() const { return (fuel_cost - energy_price) * kw_per_mw; }

  void validate() const {
    if (!(power_max >= 0.0)) throw std::invalid_argument("dg power_max must be >= 0");
    if (!(fuel_cost >= 0.0)) throw std::invalid_argument("dg fuel_cost must be >= 0");
    if (!(energy_price >= 0.0)) throw std::invalid_argument("dg energy_price must be >= 0");
  }
};

namespace detail {
// Absorbs floating-point residue when a step lands exactly on a limit.
inline constexpr double energy_slack = 1e-9;
}

inline BessState bess_step(BessState state, double discharge_mw, const BessSpec& spec,
                           double dt_hours = 1.0) {
  if (!(discharge_mw >= 0.0)) throw std::invalid_argument("bess discharge must be >= 0");
  if (discharge_mw > spec.power_max * (1.0 + detail::energy_slack))
    throw std::invalid_argument("bess discharge above power_max");
  double energy = state.energy - discharge_mw / spec.discharge_efficiency * dt_hours;
  if (energy < spec.energy_min) {
    if (energy < spec.energy_min - detail::energy_slack * std::max(1.0, spec.energy_max))
      throw InfeasibleError("bess step would drain below energy_min");
    energy = spec.energy_min;
  }
  return {energy};
}

inline double bess_max_feasible(BessState state, const BessSpec& spec, double dt_hours = 1.0) {
  const double headroom = std::max(0.0, state.energy - spec.energy_min);
  return std::min(spec.power_max, headroom * spec.discharge_efficiency / dt_hours);
}

// Runs a schedule hour by hour; returns the energy after each hour.
inline std::vector<double> bess_trajectory(BessState state, std::span<const double> discharge_mw,
                                           const BessSpec& spec, double dt_hours = 1.0) {
  std::vector<double> out;
  out.reserve(discharge_mw.size());
  for (double p : discharge_mw) {
    state = bess_step(state, p, spec, dt_hours);
    out.push_back(state.energy);
  }
  return out;
}

// Fuel cost net of the avoided energy purchase, in dollars.
inline double dg_cost(std::span<const double> schedule_mw, const DgSpec& spec,
                      double dt_hours = 1.0) {
  double mwh = 0.0;
  for (double p : schedule_mw) {
    if (!(p >= 0.0) || p > spec.power_max * (1.0 + detail::energy_slack))
      throw std::invalid_argument("dg output outside [0, power_max]");
    mwh += p * dt_hours;
  }
  return (spec.fuel_cost - spec.energy_price) * mwh * kw_per_mw;
}

}  // namespace dcm
