#pragma once

#include <stdexcept>
#include <vector>

#include "dcm/core.hpp"

namespace dcm {

// One aggregated conservation-voltage-reduction resource.
struct CvrSpec {
  double k1 = 0.40;        // share of total load reachable by CVR
  double k2 = 0.01;        // reduction factor on that share
  int max_run_hours = 3;   // longest continuous execution
  int recovery_hours = 1;  // off time needed between executions

  void validate() const {
    if (!(k1 >= 0.0 && k1 <= 1.0)) throw std::invalid_argument("cvr k1 must be in [0,1]");
    if (!(k2 >= 0.0 && k2 <= 1.0)) throw std::invalid_argument("cvr k2 must be in [0,1]");
    if (max_run_hours < 1) throw std::invalid_argument("cvr max_run_hours must be >= 1");
    if (recovery_hours < 1) throw std::invalid_argument("cvr recovery_hours must be >= 1");
  }
};

// True when every on-run fits max_run_hours and consecutive runs are at least
// recovery_hours apart. Each day starts fresh.
inline bool cvr_pattern_feasible(const std::array<bool, hours_per_day>& day, const CvrSpec& spec) {
  const auto runs = on_runs(day);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].length() > spec.max_run_hours) return false;
    if (i > 0 && runs[i].first - runs[i - 1].last - 1 < spec.recovery_hours) return false;
  }
  return true;
}

inline OptionMatrix build_cvr_options(const std::vector<int>& hours, const CvrSpec& spec) {
  if (hours.empty()) throw std::invalid_argument("build_cvr_options: empty hour set");
  return enumerate_options(hours, [&](const auto& day) { return cvr_pattern_feasible(day, spec); });
}

inline OptionMatrix build_cvr_options(const TargetHourSet& hours, const CvrSpec& spec) {
  return build_cvr_options(hours.deployable(), spec);
}

inline double cvr_reduction(double load_mw, bool on, const CvrSpec& spec) {
  if (!(load_mw >= 0.0)) throw std::invalid_argument("cvr_reduction: load must be >= 0");
  return on ? spec.k1 * spec.k2 * load_mw : 0.0;
}

// Per-hour reduction (aligned with `hours`) for one option column.
inline std::vector<double> apply_cvr_option(const OptionColumn& column, const HourlyProfile& load,
                                            const std::vector<int>& hours, const CvrSpec& spec) {
  if (column.size() != hours.size())
    throw std::invalid_argument("apply_cvr_option: column/hour dimension mismatch");
  if (load.size() != hours_per_day) throw std::invalid_argument("apply_cvr_option: need 24-hour load");
  std::vector<double> out(hours.size());
  for (std::size_t j = 0; j < hours.size(); ++j)
    out[j] = cvr_reduction(load[hours[j]], column[j] != 0, spec);
  return out;
}

}  // namespace dcm
