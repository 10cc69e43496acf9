#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcm/core.hpp"

namespace dcm {

enum class TclGroupKind {
  cycling_10in30,  // 10 minutes off in every 30, no duration limit
  full_off,        // off for the whole hour, limited consecutive hours
};

inline std::string to_string(TclGroupKind k) {
  return k == TclGroupKind::cycling_10in30 ? "cycling" : "full_off";
}

// Aggregate HVAC fleet for one demand-response group. The duty cycle rises
// linearly from 0 at balance_temp to 1 at design_temp.
struct TclGroupSpec {
  TclGroupKind kind = TclGroupKind::cycling_10in30;
  double unit_count = 30000.0;
  double rated_power_kw = 5.0;
  double scale_factor = 1.0;
  int max_consecutive_hours = 0;  // 0 = unlimited
  double balance_temp = 18.0;
  double design_temp = 40.0;
  double payback_recovery_fraction = 1.0;  // kappa

  static TclGroupSpec cycling(double units = 30000.0) {
    TclGroupSpec s;
    s.kind = TclGroupKind::cycling_10in30;
    s.unit_count = units;
    s.max_consecutive_hours = 0;
    return s;
  }

  static TclGroupSpec full_off(double units = 30000.0) {
    TclGroupSpec s;
    s.kind = TclGroupKind::full_off;
    s.unit_count = units;
    s.max_consecutive_hours = 2;
    return s;
  }

  double capacity_mw() const { return unit_count * rated_power_kw * scale_factor / 1000.0; }

  void validate() const {
    if (!(unit_count > 0.0)) throw std::invalid_argument("tcl unit_count must be > 0");
    if (!(rated_power_kw > 0.0)) throw std::invalid_argument("tcl rated_power must be > 0");
    if (!(scale_factor > 0.0)) throw std::invalid_argument("tcl scale_factor must be > 0");
    if (max_consecutive_hours < 0) throw std::invalid_argument("tcl max_consecutive_hours must be >= 0");
    if (!(balance_temp < design_temp)) throw std::invalid_argument("tcl balance_temp must be < design_temp");
    if (!(payback_recovery_fraction >= 0.9 && payback_recovery_fraction <= 1.1))
      throw std::invalid_argument("tcl payback_recovery_fraction must be in [0.9,1.1]");
  }
};

// On-time ceiling of a unit under 10-off-in-30 cycling.
inline constexpr double cycling_on_cap = 2.0 / 3.0;

inline double duty_cycle(double temp, const TclGroupSpec& spec) {
  return std::clamp((temp - spec.balance_temp) / (spec.design_temp - spec.balance_temp), 0.0, 1.0);
}

inline HourlyProfile hvac_normal_profile(const HourlyProfile& temperature, const TclGroupSpec& spec) {
  if (temperature.size() != hours_per_day)
    throw std::invalid_argument("hvac_normal_profile needs 24 temperatures");
  std::vector<double> mw(hours_per_day);
  const double cap = spec.capacity_mw();
  for (int h = 0; h < hours_per_day; ++h) mw[h] = duty_cycle(temperature[h], spec) * cap;
  return HourlyProfile(std::move(mw), temperature.start());
}

// Load shed during one deployed hour.
inline double tcl_shed_mw(double duty, const TclGroupSpec& spec) {
  const double cap = spec.capacity_mw();
  if (spec.kind == TclGroupKind::full_off) return duty * cap;
  return std::max(0.0, duty - cycling_on_cap) * cap;
}

// Run-length limit, plus no deployment in the last hour of the day since its
// payback would have nowhere to land.
inline bool tcl_pattern_feasible(const std::array<bool, hours_per_day>& day, const TclGroupSpec& spec) {
  if (day[last_hour]) return false;
  if (spec.max_consecutive_hours == 0) return true;
  for (const auto& r : on_runs(day))
    if (r.length() > spec.max_consecutive_hours) return false;
  return true;
}

// Change in group load relative to normal operation over the whole day:
// positive = shed during deployment, negative = payback afterwards.
//
// Each run's deferred energy (times kappa) is repaid starting the hour after
// the run, limited by the spare capacity (1 - duty) * capacity of each hour and
// skipping hours where the group is deployed. Whatever is still owed when the
// day runs out lands in hour 23.
inline DayArray dr_profile(const OptionColumn& column, std::span<const int> hours,
                           std::span<const double> temperature, const TclGroupSpec& spec) {
  if (temperature.size() != hours_per_day) throw std::invalid_argument("dr_profile needs 24 temperatures");
  const auto on = embed(column, hours);
  if (!tcl_pattern_feasible(on, spec)) throw std::invalid_argument("dr_profile: infeasible deployment column");

  const double cap = spec.capacity_mw();
  DayArray duty{};
  for (int h = 0; h < hours_per_day; ++h) duty[h] = duty_cycle(temperature[h], spec);

  DayArray delta{};
  for (const auto& run : on_runs(on)) {
    double deferred = 0.0;
    for (int h = run.first; h <= run.last; ++h) {
      const double shed = tcl_shed_mw(duty[h], spec);
      delta[h] += shed;
      deferred += shed;
    }
    deferred *= spec.payback_recovery_fraction;
    for (int h = run.last + 1; h < hours_per_day && deferred > 0.0; ++h) {
      if (on[h]) continue;
      const double take = std::min(deferred, (1.0 - duty[h]) * cap);
      delta[h] -= take;
      deferred -= take;
    }
    if (deferred > 0.0) delta[last_hour] -= deferred;
  }
  return delta;
}

inline DayArray dr_profile(const OptionColumn& column, std::span<const int> hours,
                           const HourlyProfile& temperature, const TclGroupSpec& spec) {
  return dr_profile(column, hours, temperature.values(), spec);
}

struct TclOptionSet {
  OptionMatrix deployment;
  std::vector<DayArray> reduction;  // one 24-hour delta per deployment column

  std::size_t option_count() const { return deployment.option_count(); }
};

inline TclOptionSet build_tcl_options(const std::vector<int>& hours, const HourlyProfile& temperature,
                                      const TclGroupSpec& spec) {
  TclOptionSet set;
  set.deployment =
      enumerate_options(hours, [&](const auto& day) { return tcl_pattern_feasible(day, spec); });
  set.reduction.reserve(set.deployment.option_count());
  for (const auto& c : set.deployment.columns)
    set.reduction.push_back(dr_profile(c, hours, temperature, spec));
  return set;
}

inline DayArray total_tcl_reduction(std::span<const DayArray> per_group) {
  DayArray sum{};
  for (const auto& g : per_group)
    for (int h = 0; h < hours_per_day; ++h) sum[h] += g[h];
  return sum;
}

inline int tcl_dr_hour_count(std::span<const OptionColumn> selected) {
  int n = 0;
  for (const auto& c : selected) n += count_on(c);
  return n;
}

}  // namespace dcm
