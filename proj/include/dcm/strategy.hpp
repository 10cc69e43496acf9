#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dcm/core.hpp"

namespace dcm {

struct GateConfig {
  double error_margin = 0.10;            // K_error
  double peak_day_prob_threshold = 0.5;  // p_th

  void validate() const {
    if (!(error_margin >= 0.0)) throw std::invalid_argument("gate error_margin must be >= 0");
    if (!(peak_day_prob_threshold >= 0.0 && peak_day_prob_threshold <= 1.0))
      throw std::invalid_argument("gate peak_day_prob_threshold must be in [0,1]");
  }
};

enum class StrategyKind {
  s1_prob_top_x,
  s2_dalf_top_x,
  s3_prob_horizon,
  s4_dalf_horizon,
  s5_combined_horizon,
};

inline constexpr std::array<StrategyKind, 5> all_strategies = {
    StrategyKind::s1_prob_top_x, StrategyKind::s2_dalf_top_x, StrategyKind::s3_prob_horizon,
    StrategyKind::s4_dalf_horizon, StrategyKind::s5_combined_horizon};

inline bool is_horizon(StrategyKind k) {
  return k == StrategyKind::s3_prob_horizon || k == StrategyKind::s4_dalf_horizon ||
         k == StrategyKind::s5_combined_horizon;
}

inline std::string_view short_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::s1_prob_top_x: return "S1";
    case StrategyKind::s2_dalf_top_x: return "S2";
    case StrategyKind::s3_prob_horizon: return "S3";
    case StrategyKind::s4_dalf_horizon: return "S4";
    case StrategyKind::s5_combined_horizon: return "S5";
  }
  return "?";
}

inline std::optional<StrategyKind> parse_strategy(std::string_view s) {
  for (auto k : all_strategies) {
    const auto n = short_name(k);
    if (s.size() == 2 && (s[0] == 's' || s[0] == 'S') && s[1] == n[1]) return k;
  }
  return std::nullopt;
}

struct StrategyChoice {
  StrategyKind kind = StrategyKind::s1_prob_top_x;
  int x = 2;
  bool append_payback_hour = false;

  void validate() const {
    if (x < 1 || x > hours_per_day) throw std::invalid_argument("strategy x must be in 1..24");
    if (append_payback_hour && !is_horizon(kind))
      throw std::invalid_argument("payback hour applies to horizon strategies (S3-S5) only");
  }
};

enum class GateDecision { run, skip };

// Running record of one billing month.
struct MonthLedger {
  int month_key = -1;              // Date::month_key(), -1 before the first day
  double historical_peak_mw = 0.0; // mitigated
  double baseline_peak_mw = 0.0;
  double operating_cost_dollars = 0.0;
  int dr_hours = 0;
  double battery_cycles = 0.0;
  double discharged_mwh = 0.0;
  int dcm_days = 0;
  int payback_shift_days = 0;  // days whose mitigated max exceeded the baseline max
};

// Forecast peak inflated by the error margin must strictly beat the month's
// peak so far; a relative 1e-12 band around equality counts as not beating it.
inline GateDecision gate(const DayContext& ctx, const MonthLedger& ledger, const GateConfig& cfg) {
  const double inflated = ctx.forecast_load.max() * (1.0 + cfg.error_margin);
  const double hist = ledger.historical_peak_mw;
  const bool peak_test = inflated > hist + 1e-12 * std::abs(hist);
  const bool prob_test = ctx.peak_day_probability >= cfg.peak_day_prob_threshold;
  return peak_test && prob_test ? GateDecision::run : GateDecision::skip;
}

namespace detail {
inline TargetHourSet span_of(const std::vector<int>& hours, bool append_payback) {
  const auto [lo, hi] = std::minmax_element(hours.begin(), hours.end());
  std::vector<int> span;
  for (int h = *lo; h <= *hi; ++h) span.push_back(h);
  if (!append_payback) return TargetHourSet(std::move(span), true);
  if (*hi == last_hour) return TargetHourSet(std::move(span), true, false, true);
  span.push_back(*hi + 1);
  return TargetHourSet(std::move(span), true, true);
}
}  // namespace detail

inline TargetHourSet select_hours(const StrategyChoice& choice, const DayContext& ctx) {
  choice.validate();
  const auto prob = [&] { return top_x_hours(ctx.peak_hour_probabilities, choice.x); };
  const auto pred = [&] { return top_x_hours(ctx.forecast_load.values(), choice.x); };
  switch (choice.kind) {
    case StrategyKind::s1_prob_top_x: return prob();
    case StrategyKind::s2_dalf_top_x: return pred();
    case StrategyKind::s3_prob_horizon:
      return detail::span_of(prob().hours(), choice.append_payback_hour);
    case StrategyKind::s4_dalf_horizon:
      return detail::span_of(pred().hours(), choice.append_payback_hour);
    case StrategyKind::s5_combined_horizon: {
      std::vector<int> u = prob().hours();
      const auto p = pred();
      u.insert(u.end(), p.hours().begin(), p.hours().end());
      return detail::span_of(u, choice.append_payback_hour);
    }
  }
  throw std::logic_error("unknown strategy");
}

struct DayCosts {
  double operating_cost_dollars = 0.0;
  int dr_hours = 0;
  double discharged_mwh = 0.0;
  double usable_energy_mwh = 0.0;  // BESS E_max - E_min, 0 without a battery
  bool dcm_ran = false;
};

// Ledger to gate against on `date`: a new month starts from zero peaks.
inline MonthLedger ledger_for(const MonthLedger& ledger, const Date& date) {
  if (ledger.month_key == date.month_key()) return ledger;
  MonthLedger fresh;
  fresh.month_key = date.month_key();
  return fresh;
}

inline MonthLedger update_ledger(const MonthLedger& ledger, const Date& date,
                                 const HourlyProfile& mitigated_day,
                                 const HourlyProfile& baseline_day, const DayCosts& costs) {
  if (mitigated_day.size() != hours_per_day || baseline_day.size() != hours_per_day)
    throw std::invalid_argument("update_ledger needs 24-hour profiles");
  MonthLedger next = ledger_for(ledger, date);
  const double mit = mitigated_day.max();
  const double base = baseline_day.max();
  next.historical_peak_mw = std::max(next.historical_peak_mw, mit);
  next.baseline_peak_mw = std::max(next.baseline_peak_mw, base);
  next.operating_cost_dollars += costs.operating_cost_dollars;
  next.dr_hours += costs.dr_hours;
  next.discharged_mwh += costs.discharged_mwh;
  if (costs.usable_energy_mwh > 0.0) next.battery_cycles += costs.discharged_mwh / costs.usable_energy_mwh;
  if (costs.dcm_ran) ++next.dcm_days;
  if (mit > base + 1e-9 * std::max(1.0, base)) ++next.payback_shift_days;
  return next;
}

}  // namespace dcm
