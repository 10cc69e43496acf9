#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcm/core.hpp"
#include "dcm/cvr.hpp"
#include "dcm/resources.hpp"
#include "dcm/strategy.hpp"
#include "dcm/tcl.hpp"

namespace dcm {

// Resources available to the coordinator.
struct Fleet {
  std::optional<BessSpec> bess;
  std::optional<DgSpec> dg;
  std::optional<CvrSpec> cvr;
  std::vector<TclGroupSpec> tcl_groups;
  std::array<bool, 12> tcl_months{};  // months in which the DR groups may be called

  // 40 MW DG, 2 h @ 10 MW battery, CVR, two 30,000-unit HVAC groups active June-September.
  static Fleet standard() {
    Fleet f;
    f.bess = BessSpec{};
    f.dg = DgSpec{};
    f.cvr = CvrSpec{};
    f.tcl_groups = {TclGroupSpec::cycling(), TclGroupSpec::full_off()};
    f.tcl_months = {false, false, false, false, false, true, true, true, true, false, false, false};
    return f;
  }

  bool tcl_active(int month) const { return month >= 1 && month <= 12 && tcl_months[month - 1]; }

  bool empty() const { return !bess && !dg && !cvr && tcl_groups.empty(); }

  void validate() const {
    if (bess) bess->validate();
    if (dg) dg->validate();
    if (cvr) cvr->validate();
    for (const auto& g : tcl_groups) g.validate();
  }
};

enum class ObjectiveKind { f1, f2 };

inline ObjectiveKind objective_for(StrategyKind k) {
  return k == StrategyKind::s1_prob_top_x ? ObjectiveKind::f1 : ObjectiveKind::f2;
}

struct ObjectiveConfig {
  double beta = 20000.0;            // $ per MW of (expected) peak reduction
  double tcl_hour_penalty = 500.0;  // $ per group-hour of DR deployment
  ObjectiveKind kind = ObjectiveKind::f2;

  void validate() const {
    if (!(beta >= 0.0)) throw std::invalid_argument("objective beta must be >= 0");
    if (!(tcl_hour_penalty >= 0.0)) throw std::invalid_argument("objective tcl_hour_penalty must be >= 0");
  }
};

struct SearchLimits {
  // Option combinations enumerated exhaustively; larger spaces use branch-and-bound.
  std::size_t enumeration_budget = 100000;
  // Hard cap on inner solves during branch-and-bound.
  std::size_t node_limit = 5000000;
};

class SearchBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DispatchSchedule {
  TargetHourSet hours;              // includes an appended payback hour when present
  std::vector<double> bess_mw;      // aligned with hours.hours()
  std::vector<double> dg_mw;        // aligned with hours.hours()
  int cvr_option = -1;              // -1 without a CVR resource
  OptionColumn cvr_column;          // over hours.deployable()
  std::vector<int> tcl_options;     // one per fleet TCL group
  std::vector<OptionColumn> tcl_columns;
  std::vector<double> predicted_residual;  // aligned with hours.hours()
  double predicted_peak_mw = 0.0;
  double objective_value = 0.0;
  bool uniform_weights = false;  // f1 fell back to uniform weights
  bool branch_and_bound = false;
  std::size_t inner_solves = 0;

  // Schedule that deploys nothing.
  static DispatchSchedule idle(const TargetHourSet& hours, const Fleet& fleet) {
    DispatchSchedule s;
    s.hours = hours;
    const std::size_t n = hours.size();
    const std::size_t nd = hours.deployable().size();
    s.bess_mw.assign(n, 0.0);
    s.dg_mw.assign(n, 0.0);
    if (fleet.cvr) s.cvr_column.assign(nd, 0);
    s.tcl_columns.assign(fleet.tcl_groups.size(), OptionColumn(nd, 0));
    s.tcl_options.assign(fleet.tcl_groups.size(), -1);
    return s;
  }
};

// Objective evaluation --------------------------------------------------------
//
// These recompute everything from the schedule's decision variables, so they
// can audit the optimizer's own bookkeeping.

struct PlannedDeltas {
  std::vector<double> cvr;  // aligned with hours
  DayArray tcl{};           // whole day
  std::vector<double> residual;
};

inline PlannedDeltas planned_deltas(const DispatchSchedule& s, const DayContext& ctx, const Fleet& fleet) {
  const auto& hrs = s.hours.hours();
  const auto dep = s.hours.deployable();
  PlannedDeltas d;
  d.cvr.assign(hrs.size(), 0.0);
  if (fleet.cvr && !s.cvr_column.empty()) {
    const auto red = apply_cvr_option(s.cvr_column, ctx.forecast_load, dep, *fleet.cvr);
    for (std::size_t j = 0; j < dep.size(); ++j) d.cvr[j] = red[j];
  }
  std::vector<DayArray> groups;
  for (std::size_t g = 0; g < fleet.tcl_groups.size() && g < s.tcl_columns.size(); ++g)
    groups.push_back(dr_profile(s.tcl_columns[g], dep, ctx.temperature, fleet.tcl_groups[g]));
  d.tcl = total_tcl_reduction(groups);
  d.residual.resize(hrs.size());
  for (std::size_t i = 0; i < hrs.size(); ++i)
    d.residual[i] = ctx.forecast_load[hrs[i]] - s.bess_mw[i] - s.dg_mw[i] - d.cvr[i] - d.tcl[hrs[i]];
  return d;
}

inline double operating_cost(const DispatchSchedule& s, const Fleet& fleet, const ObjectiveConfig& cfg) {
  double c = 0.0;
  if (fleet.dg) c += dg_cost(s.dg_mw, *fleet.dg);
  c += cfg.tcl_hour_penalty * tcl_dr_hour_count(s.tcl_columns);
  return c;
}

// Normalized peak-hour weights over the targeted hours; uniform when every
// targeted probability is zero (reported through `uniform`).
inline std::vector<double> peak_hour_weights(const DayContext& ctx, const std::vector<int>& hours,
                                             bool* uniform = nullptr) {
  double sum = 0.0;
  for (int h : hours) sum += ctx.peak_hour_probabilities.at(h);
  std::vector<double> mu(hours.size());
  const bool fallback = !(sum > 0.0);
  for (std::size_t i = 0; i < hours.size(); ++i)
    mu[i] = fallback ? 1.0 / static_cast<double>(hours.size())
                     : ctx.peak_hour_probabilities[hours[i]] / sum;
  if (uniform) *uniform = fallback;
  return mu;
}

inline double objective_f1(const DispatchSchedule& s, const DayContext& ctx, const Fleet& fleet,
                           const ObjectiveConfig& cfg) {
  const auto& hrs = s.hours.hours();
  if (hrs.empty()) return 0.0;
  const auto d = planned_deltas(s, ctx, fleet);
  const auto mu = peak_hour_weights(ctx, hrs);
  double weighted = 0.0;
  for (std::size_t i = 0; i < hrs.size(); ++i)
    weighted += mu[i] * (s.bess_mw[i] + s.dg_mw[i] + d.cvr[i] + d.tcl[hrs[i]]);
  return cfg.beta * weighted - operating_cost(s, fleet, cfg);
}

// Expected peak after mitigation: the largest planned residual over the targeted hours.
inline double predicted_peak(const DispatchSchedule& s, const DayContext& ctx, const Fleet& fleet) {
  const auto d = planned_deltas(s, ctx, fleet);
  return *std::max_element(d.residual.begin(), d.residual.end());
}

inline double objective_f2(const DispatchSchedule& s, const DayContext& ctx, const Fleet& fleet,
                           const ObjectiveConfig& cfg) {
  if (s.hours.empty()) return 0.0;
  const double forecast_peak = ctx.forecast_load[ctx.forecast_load.argmax()];
  const double reduction = forecast_peak - predicted_peak(s, ctx, fleet);
  return cfg.beta * reduction - operating_cost(s, fleet, cfg);
}

inline double objective(const DispatchSchedule& s, const DayContext& ctx, const Fleet& fleet,
                        const ObjectiveConfig& cfg) {
  return cfg.kind == ObjectiveKind::f1 ? objective_f1(s, ctx, fleet, cfg)
                                       : objective_f2(s, ctx, fleet, cfg);
}

// Continuous BESS/DG allocation --------------------------------------------

namespace detail {

struct Continuous {
  double value = 0.0;  // beta-weighted benefit minus DG cost
  double peak = 0.0;   // f2 water level
  std::vector<double> bess;
  std::vector<double> dg;
};

struct ContinuousParams {
  double beta = 0.0;
  double bess_power = 0.0;
  double bess_energy = 0.0;  // deliverable MWh (efficiency applied)
  double dg_power = 0.0;
  double dg_cost = 0.0;  // $/MWh
};

// Smallest p with f(p) <= target for a continuous non-increasing piecewise-linear
// f whose kinks are all in `breaks`. nullopt when f never exceeds target.
template <typename F>
std::optional<double> pwl_threshold(F&& f, std::vector<double> breaks, double target) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double f0 = f(breaks.front());
  if (f0 <= target) {
    const double slope = f0 - f(breaks.front() - 1.0);
    if (slope >= 0.0) return std::nullopt;
    return breaks.front() + (target - f0) / slope;
  }
  double prev_p = breaks.front(), prev_f = f0;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double fi = f(breaks[i]);
    if (fi <= target) {
      if (prev_f == fi) return breaks[i];
      return prev_p + (prev_f - target) / (prev_f - fi) * (breaks[i] - prev_p);
    }
    prev_p = breaks[i];
    prev_f = fi;
  }
  // Non-increasing PWL stays at its last value beyond the final kink.
  return std::nullopt;
}

// min beta*p + c*G(p) with G the least DG energy that holds every hour at or below p.
inline Continuous solve_peak(const std::vector<double>& residual, double forecast_peak,
                             const ContinuousParams& prm) {
  const std::size_t n = residual.size();
  Continuous out;
  out.bess.assign(n, 0.0);
  out.dg.assign(n, 0.0);

  std::vector<double> r = residual;
  double fixed_dg_cost = 0.0;
  double dg_power = prm.dg_power;
  if (dg_power > 0.0 && prm.dg_cost <= 0.0) {
    // Free (or paid) generation: run flat out, then shave the rest with the battery.
    for (std::size_t t = 0; t < n; ++t) {
      r[t] -= dg_power;
      out.dg[t] = dg_power;
    }
    fixed_dg_cost = prm.dg_cost * dg_power * static_cast<double>(n);
    dg_power = 0.0;
  }

  const double pb = prm.bess_power, eb = prm.bess_energy, pg = dg_power, c = prm.dg_cost;
  const double r_max = *std::max_element(r.begin(), r.end());

  auto need_sum = [&](double p) {
    double s = 0.0;
    for (double v : r) s += std::max(0.0, v - p);
    return s;
  };
  auto bess_cover = [&](double p) {
    double s = 0.0;
    for (double v : r) s += std::min(std::max(0.0, v - p), pb);
    return s;
  };
  auto dg_energy = [&](double p) {
    double over_power = 0.0;
    for (double v : r) over_power += std::max(0.0, v - p - pb);
    return std::max(over_power, need_sum(p) - eb);
  };

  // Lowest reachable peak.
  double p_star = r_max - pb - pg;
  {
    std::vector<double> a(n);
    for (std::size_t t = 0; t < n; ++t) a[t] = r[t] - pg;
    auto over = [&](double p) {
      double s = 0.0;
      for (double v : a) s += std::max(0.0, v - p);
      return s;
    };
    if (auto p = pwl_threshold(over, a, eb)) p_star = std::max(p_star, *p);
  }
  p_star = std::min(p_star, r_max);

  std::vector<double> candidates = {p_star, r_max};
  if (pg > 0.0 && c > 0.0) {
    for (double v : r) {
      candidates.push_back(v);
      candidates.push_back(v - pb);
    }
    std::vector<double> breaks;
    for (double v : r) {
      breaks.push_back(v);
      breaks.push_back(v - pb);
    }
    if (auto p = pwl_threshold(bess_cover, breaks, eb)) candidates.push_back(*p);
  }

  double best_p = r_max;
  double best_j = -std::numeric_limits<double>::infinity();
  std::sort(candidates.begin(), candidates.end());
  for (double p : candidates) {
    if (p < p_star || p > r_max) continue;
    const double j = prm.beta * (forecast_peak - p) - c * dg_energy(p);
    if (j > best_j) {
      best_j = j;
      best_p = p;
    }
  }

  // Battery first (it is free), lowest forced amount then earliest hours.
  double budget = eb;
  std::vector<double> need(n);
  for (std::size_t t = 0; t < n; ++t) {
    need[t] = std::max(0.0, r[t] - best_p);
    const double lower = std::min(pb, std::max(0.0, need[t] - pg));
    out.bess[t] = lower;
    budget -= lower;
  }
  budget = std::max(0.0, budget);
  for (std::size_t t = 0; t < n && budget > 0.0; ++t) {
    const double add = std::min(std::min(need[t], pb) - out.bess[t], budget);
    if (add > 0.0) {
      out.bess[t] += add;
      budget -= add;
    }
  }
  double dg_mwh = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double g = std::clamp(need[t] - out.bess[t], 0.0, pg);
    out.dg[t] += g;
    dg_mwh += g;
  }
  out.peak = best_p;
  out.value = prm.beta * (forecast_peak - best_p) - c * dg_mwh - fixed_dg_cost;
  return out;
}

// Linear weighted allocation: DG wherever its weighted value beats its cost,
// battery energy to the highest weights first (earlier hour on ties).
inline Continuous solve_weighted(const std::vector<double>& mu, const ContinuousParams& prm) {
  const std::size_t n = mu.size();
  Continuous out;
  out.bess.assign(n, 0.0);
  out.dg.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    if (prm.dg_power > 0.0 && prm.beta * mu[t] - prm.dg_cost > 0.0) out.dg[t] = prm.dg_power;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mu[a] > mu[b]; });
  double budget = prm.bess_energy;
  for (auto t : order) {
    if (!(mu[t] > 0.0) || budget <= 0.0) break;
    out.bess[t] = std::min(prm.bess_power, budget);
    budget -= out.bess[t];
  }
  for (std::size_t t = 0; t < n; ++t)
    out.value += prm.beta * mu[t] * (out.bess[t] + out.dg[t]) - prm.dg_cost * out.dg[t];
  return out;
}

// A categorical resource after option generation, projected onto the targeted hours.
struct Categorical {
  std::vector<std::vector<double>> reduction;  // [option][target hour index]
  std::vector<double> penalty;                 // [option]
  std::vector<double> best_case;               // per-hour max over options (>= 0)
};

}  // namespace detail

// Chooses one CVR option, one option per TCL group and the BESS/DG schedule
// maximizing f1 or f2. Option combinations are searched in lexicographic index
// order (CVR, then TCL groups in fleet order) and the first maximum wins.
inline DispatchSchedule optimize(const DayContext& ctx, const TargetHourSet& hours, const Fleet& fleet,
                                 const ObjectiveConfig& cfg, const SearchLimits& limits = {}) {
  if (hours.empty()) throw std::invalid_argument("optimize: empty target hour set");
  const auto& hrs = hours.hours();
  const auto dep = hours.deployable();
  const std::size_t n = hrs.size();

  std::vector<double> forecast(n);
  for (std::size_t i = 0; i < n; ++i) forecast[i] = ctx.forecast_load[hrs[i]];
  const double forecast_peak = ctx.forecast_load[ctx.forecast_load.argmax()];

  bool uniform = false;
  const auto mu = cfg.kind == ObjectiveKind::f1 ? peak_hour_weights(ctx, hrs, &uniform)
                                                : std::vector<double>(n, 0.0);

  // Categorical resources.
  std::vector<detail::Categorical> cats;
  std::vector<OptionMatrix> matrices;
  auto add_categorical = [&](OptionMatrix m, std::vector<std::vector<double>> red, double per_hour_penalty) {
    detail::Categorical c;
    c.best_case.assign(n, 0.0);
    for (std::size_t o = 0; o < m.columns.size(); ++o) {
      c.penalty.push_back(per_hour_penalty * count_on(m.columns[o]));
      for (std::size_t i = 0; i < n; ++i) c.best_case[i] = std::max(c.best_case[i], red[o][i]);
    }
    c.reduction = std::move(red);
    cats.push_back(std::move(c));
    matrices.push_back(std::move(m));
  };

  if (fleet.cvr) {
    auto m = build_cvr_options(dep, *fleet.cvr);
    std::vector<std::vector<double>> red;
    for (const auto& col : m.columns) {
      auto r = apply_cvr_option(col, ctx.forecast_load, dep, *fleet.cvr);
      r.resize(n, 0.0);  // appended payback hour gets no CVR
      red.push_back(std::move(r));
    }
    add_categorical(std::move(m), std::move(red), 0.0);
  }
  const bool tcl_on = fleet.tcl_active(ctx.date.month);
  for (const auto& g : fleet.tcl_groups) {
    OptionMatrix m;
    std::vector<std::vector<double>> red;
    if (tcl_on) {
      auto set = build_tcl_options(dep, ctx.temperature, g);
      m = std::move(set.deployment);
      for (const auto& day : set.reduction) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = day[hrs[i]];
        red.push_back(std::move(r));
      }
    } else {
      m.hours = dep;
      m.columns = {OptionColumn(dep.size(), 0)};
      red = {std::vector<double>(n, 0.0)};
    }
    add_categorical(std::move(m), std::move(red), cfg.tcl_hour_penalty);
  }

  detail::ContinuousParams prm;
  prm.beta = cfg.beta;
  if (fleet.bess) {
    prm.bess_power = fleet.bess->power_max;
    prm.bess_energy = fleet.bess->usable_energy() * fleet.bess->discharge_efficiency;
  }
  if (fleet.dg) {
    prm.dg_power = fleet.dg->power_max;
    prm.dg_cost = fleet.dg->net_cost_per_mwh();
  }

  // f1 separates: the continuous part does not depend on the categorical choice.
  std::optional<detail::Continuous> weighted;
  if (cfg.kind == ObjectiveKind::f1) weighted = detail::solve_weighted(mu, prm);

  std::size_t solves = 0;
  auto evaluate = [&](const std::vector<double>& reduction, double penalty) {
    ++solves;
    if (cfg.kind == ObjectiveKind::f1) {
      double v = weighted->value - penalty;
      for (std::size_t i = 0; i < n; ++i) v += cfg.beta * mu[i] * reduction[i];
      return v;
    }
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = forecast[i] - reduction[i];
    return detail::solve_peak(r, forecast_peak, prm).value - penalty;
  };

  double combos = 1.0;
  for (const auto& c : cats) combos *= static_cast<double>(c.reduction.size());
  const bool prune = combos > static_cast<double>(limits.enumeration_budget);

  // Depth-first search over option indices.
  const std::size_t depth = cats.size();
  std::vector<int> choice(depth, 0), best_choice(depth, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> partial(depth + 1, std::vector<double>(n, 0.0));
  std::vector<double> partial_pen(depth + 1, 0.0);
  // Optimistic remainder for levels k..depth-1.
  std::vector<std::vector<double>> tail(depth + 1, std::vector<double>(n, 0.0));
  for (std::size_t k = depth; k-- > 0;)
    for (std::size_t i = 0; i < n; ++i) tail[k][i] = tail[k + 1][i] + cats[k].best_case[i];

  auto dfs = [&](auto&& self, std::size_t k) -> void {
    if (k == depth) {
      const double v = evaluate(partial[k], partial_pen[k]);
      if (v > best) {
        best = v;
        best_choice = choice;
      }
      return;
    }
    const auto& cat = cats[k];
    for (std::size_t o = 0; o < cat.reduction.size(); ++o) {
      choice[k] = static_cast<int>(o);
      for (std::size_t i = 0; i < n; ++i) partial[k + 1][i] = partial[k][i] + cat.reduction[o][i];
      partial_pen[k + 1] = partial_pen[k] + cat.penalty[o];
      if (prune && k + 1 < depth && std::isfinite(best)) {
        std::vector<double> optimistic(n);
        for (std::size_t i = 0; i < n; ++i) optimistic[i] = partial[k + 1][i] + tail[k + 1][i];
        const double bound = evaluate(optimistic, partial_pen[k + 1]);
        if (bound < best - 1e-9 * std::max(1.0, std::abs(best))) continue;
      }
      if (prune && solves > limits.node_limit)
        throw SearchBudgetError("dispatch search exceeded node limit (" + std::to_string(limits.node_limit) +
                                " inner solves); reduce the target horizon or raise node_limit");
      self(self, k + 1);
    }
  };
  dfs(dfs, 0);

  // Assemble the winning schedule.
  DispatchSchedule s = DispatchSchedule::idle(hours, fleet);
  s.uniform_weights = uniform;
  s.branch_and_bound = prune;
  s.inner_solves = solves;
  std::vector<double> reduction(n, 0.0);
  std::size_t k = 0;
  if (fleet.cvr) {
    s.cvr_option = best_choice[k];
    s.cvr_column = matrices[k].columns[best_choice[k]];
    for (std::size_t i = 0; i < n; ++i) reduction[i] += cats[k].reduction[best_choice[k]][i];
    ++k;
  }
  for (std::size_t g = 0; g < fleet.tcl_groups.size(); ++g, ++k) {
    s.tcl_options[g] = best_choice[k];
    s.tcl_columns[g] = matrices[k].columns[best_choice[k]];
    for (std::size_t i = 0; i < n; ++i) reduction[i] += cats[k].reduction[best_choice[k]][i];
  }
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = forecast[i] - reduction[i];
  const auto cont = cfg.kind == ObjectiveKind::f1 ? *weighted : detail::solve_peak(r, forecast_peak, prm);
  s.bess_mw = cont.bess;
  s.dg_mw = cont.dg;
  s.predicted_residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.predicted_residual[i] = r[i] - s.bess_mw[i] - s.dg_mw[i];
  s.predicted_peak_mw = *std::max_element(s.predicted_residual.begin(), s.predicted_residual.end());
  s.objective_value = best;
  return s;
}

// Executes a committed schedule against the realized day. BESS/DG deliver as
// planned; CVR and TCL effects are recomputed from actual load and temperature.
inline HourlyProfile evaluate_on_actual(const DispatchSchedule& s, const HourlyProfile& actual_load,
                                        const HourlyProfile& actual_temperature, const Fleet& fleet) {
  if (actual_load.size() != hours_per_day) throw std::invalid_argument("evaluate_on_actual needs 24 loads");
  auto day = actual_load.to_day_array();
  const auto& hrs = s.hours.hours();
  const auto dep = s.hours.deployable();
  for (std::size_t i = 0; i < hrs.size(); ++i) day[hrs[i]] -= s.bess_mw[i] + s.dg_mw[i];
  if (fleet.cvr && !s.cvr_column.empty())
    for (std::size_t j = 0; j < dep.size(); ++j)
      day[dep[j]] -= cvr_reduction(actual_load[dep[j]], s.cvr_column[j] != 0, *fleet.cvr);
  for (std::size_t g = 0; g < fleet.tcl_groups.size() && g < s.tcl_columns.size(); ++g) {
    if (count_on(s.tcl_columns[g]) == 0) continue;
    const auto delta = dr_profile(s.tcl_columns[g], dep, actual_temperature, fleet.tcl_groups[g]);
    for (int h = 0; h < hours_per_day; ++h) day[h] -= delta[h];
  }
  return HourlyProfile::from_day(day, actual_load.start().date);
}

}  // namespace dcm
