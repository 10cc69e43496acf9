#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcm/core.hpp"
#include "dcm/dispatch.hpp"
#include "dcm/strategy.hpp"

namespace dcm {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tariff {
  double demand_rate = 20.0;  // $/kW-month

  void validate() const {
    if (!(demand_rate >= 0.0)) throw std::invalid_argument("tariff demand_rate must be >= 0");
  }
};

inline double monthly_demand_charge(double peak_mw, const Tariff& tariff) {
  if (!(peak_mw >= 0.0)) throw std::invalid_argument("monthly_demand_charge: peak must be >= 0");
  return peak_mw * kw_per_mw * tariff.demand_rate;
}

// Synthetic data ---------------------------------------------------------------

struct ScenarioParams {
  std::uint64_t seed = 1;
  int year = 2020;
  double forecast_sigma = 0.01;        // relative std-dev of hourly forecast error
  double probability_fidelity = 0.8;   // 1 = peak-hour probability mass on the true peak
  double temperature_sigma = 0.0;      // degC std-dev of temperature forecast error
  double base_load_mw = 9000.0;
  double cooling_mw_per_degc = 300.0;
  double heating_mw_per_degc = 280.0;
};

struct Scenario {
  std::optional<ScenarioParams> params;  // absent for ingested data
  std::vector<DayContext> days;
  std::vector<HourlyProfile> actual_temperature;  // one per day

  std::size_t size() const { return days.size(); }
};

namespace detail {
inline double bump(double h, double center, double width) {
  const double z = (h - center) / width;
  return std::exp(-0.5 * z * z);
}

// Within-month rank of each day's value mapped to (0,1]: the month's largest
// day gets 1 and each step down the ranking multiplies by exp(-1/4).
inline std::vector<double> rank_in_month(const std::vector<DayContext>& days, const std::vector<double>& v) {
  std::vector<double> out(days.size(), 0.0);
  for (std::size_t i = 0; i < days.size(); ++i) {
    int higher = 0;
    for (std::size_t j = 0; j < days.size(); ++j) {
      if (days[j].date.month_key() != days[i].date.month_key()) continue;
      if (v[j] > v[i] || (v[j] == v[i] && j < i)) ++higher;
    }
    out[i] = std::exp(-static_cast<double>(higher) / 4.0);
  }
  return out;
}
}  // namespace detail

// A year of hourly data: summer days peak once in the afternoon, winter days in
// the morning and evening. Load follows temperature through cooling and heating
// sensitivities; forecasts add zero-mean relative noise.
inline Scenario generate_synthetic_scenario(const ScenarioParams& p) {
  if (!(p.probability_fidelity >= 0.0 && p.probability_fidelity <= 1.0))
    throw std::invalid_argument("probability_fidelity must be in [0,1]");
  if (!(p.forecast_sigma >= 0.0) || !(p.temperature_sigma >= 0.0))
    throw std::invalid_argument("noise std-devs must be >= 0");

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Scenario sc;
  sc.params = p;
  double anomaly = 0.0;
  std::vector<double> actual_peaks, forecast_peaks;
  for (int d = 0; d < days_per_year; ++d) {
    const Date date = Date::from_day_of_year(p.year, d);
    anomaly = 0.7 * anomaly + 2.2 * unit(rng);
    const double daily_mean = 15.5 + 11.5 * std::cos(two_pi * (d - 200) / days_per_year) + anomaly;
    const double swing = 5.5 + 0.8 * unit(rng);
    const double level = 1.0 + 0.02 * unit(rng);
    // Peak timing drifts from day to day.
    const double cool_peak = 16.5 + 0.9 * unit(rng);
    const double morning = 1.0 + 0.25 * unit(rng);
    const double evening = 1.0 + 0.25 * unit(rng);

    DayArray temp{}, temp_fc{}, load{}, load_fc{};
    for (int h = 0; h < hours_per_day; ++h)
      temp[h] = daily_mean + swing * std::cos(two_pi * (h - 15) / hours_per_day);
    for (int h = 0; h < hours_per_day; ++h) {
      const double lagged = temp[(h + hours_per_day - 1) % hours_per_day];
      const double base = p.base_load_mw * level * (0.74 + 0.14 * detail::bump(h, 12.5, 4.5));
      const double cooling = p.cooling_mw_per_degc * std::max(0.0, lagged - 21.0) *
                             (0.7 + 0.5 * detail::bump(h, cool_peak, 2.2));
      const double heat_need = std::max(0.0, 14.0 - temp[h]);
      const double heating = p.heating_mw_per_degc * heat_need *
                             (0.45 + 0.75 * morning * detail::bump(h, 7.5, 1.4) +
                              1.3 * evening * detail::bump(h, 19.0, 1.6));
      load[h] = std::max(0.0, (base + cooling + heating) * (1.0 + 0.004 * unit(rng)));
    }
    // Forecast error: a timing shift of the whole shape (50 * sigma hours
    // std-dev) plus independent relative noise per hour.
    const double shift = 50.0 * p.forecast_sigma * unit(rng);
    for (int h = 0; h < hours_per_day; ++h) {
      const double x = std::clamp(h - shift, 0.0, static_cast<double>(last_hour));
      const int lo = std::min(static_cast<int>(x), last_hour - 1);
      const double w = x - lo;
      const double shifted = shift == 0.0 ? load[h] : (1.0 - w) * load[lo] + w * load[lo + 1];
      load_fc[h] = std::max(0.0, shifted * (1.0 + p.forecast_sigma * unit(rng)));
      temp_fc[h] = temp[h] + p.temperature_sigma * unit(rng);
    }

    DayContext ctx;
    ctx.date = date;
    ctx.actual_load = HourlyProfile::from_day(load, date);
    ctx.forecast_load = HourlyProfile::from_day(load_fc, date);
    ctx.temperature = HourlyProfile::from_day(temp_fc, date);

    // Peak-hour likelihoods: indicator of the realized peak hour blended with a
    // sharpened softmax of the forecast.
    const std::size_t true_peak = ctx.actual_load.argmax();
    const double fc_max = ctx.forecast_load.max();
    const double tau = std::max(1e-9, 0.01 * fc_max);
    DayArray soft{};
    double z = 0.0;
    for (int h = 0; h < hours_per_day; ++h) z += soft[h] = std::exp((load_fc[h] - fc_max) / tau);
    ctx.peak_hour_probabilities.assign(hours_per_day, 0.0);
    const double f = p.probability_fidelity;
    for (int h = 0; h < hours_per_day; ++h) {
      const double v = (1.0 - f) * soft[h] / z + (h == static_cast<int>(true_peak) ? f : 0.0);
      ctx.peak_hour_probabilities[h] = std::clamp(v, 0.0, 1.0);
    }

    actual_peaks.push_back(ctx.actual_load.max());
    forecast_peaks.push_back(fc_max);
    sc.days.push_back(std::move(ctx));
    sc.actual_temperature.push_back(HourlyProfile::from_day(temp, date));
  }

  const auto by_actual = detail::rank_in_month(sc.days, actual_peaks);
  const auto by_forecast = detail::rank_in_month(sc.days, forecast_peaks);
  for (std::size_t i = 0; i < sc.days.size(); ++i)
    sc.days[i].peak_day_probability =
        std::clamp(p.probability_fidelity * by_actual[i] + (1.0 - p.probability_fidelity) * by_forecast[i], 0.0, 1.0);
  return sc;
}

// Simulation -------------------------------------------------------------------

struct SimulationConfig {
  Fleet fleet = Fleet::standard();
  GateConfig gate;
  StrategyChoice strategy;
  double beta_f1 = 20000.0;
  double beta_f2 = 20000.0;
  double tcl_hour_penalty = 500.0;
  SearchLimits limits;
  Tariff tariff;

  ObjectiveConfig objective() const {
    ObjectiveConfig o;
    o.kind = objective_for(strategy.kind);
    o.beta = o.kind == ObjectiveKind::f1 ? beta_f1 : beta_f2;
    o.tcl_hour_penalty = tcl_hour_penalty;
    return o;
  }

  void validate() const {
    fleet.validate();
    gate.validate();
    strategy.validate();
    objective().validate();
    tariff.validate();
  }
};

struct DayRecord {
  Date date;
  bool ran = false;
  std::optional<DispatchSchedule> schedule;
  HourlyProfile baseline;
  HourlyProfile mitigated;
  double operating_cost = 0.0;
};

struct MonthReport {
  int year = 0;
  int month = 0;
  double baseline_peak_mw = 0.0;
  double mitigated_peak_mw = 0.0;
  double demand_charge_baseline = 0.0;
  double demand_charge_mitigated = 0.0;
  double operating_cost = 0.0;
  int dr_hours = 0;
  double battery_cycles = 0.0;
  int dcm_days = 0;
  int payback_shift_days = 0;
  double savings = 0.0;
  bool negative_savings = false;
  bool payback_shift = false;  // mitigated monthly peak above the baseline peak
};

struct AnnualReport {
  StrategyChoice strategy;
  std::vector<MonthReport> months;
  std::vector<DayRecord> days;
  double demand_charge_baseline = 0.0;
  double demand_charge_mitigated = 0.0;
  double operating_cost = 0.0;
  double savings = 0.0;
  double battery_cycles = 0.0;
  int dr_hours = 0;
  int dcm_days = 0;
  int payback_shift_months = 0;
  // Charging energy and customer compensation are not netted out of savings.
  bool charging_cost_included = false;
  bool tcl_compensation_included = false;
};

inline MonthReport close_month(const MonthLedger& l, const Tariff& tariff) {
  MonthReport m;
  m.year = l.month_key / 12;
  m.month = l.month_key % 12 + 1;
  m.baseline_peak_mw = l.baseline_peak_mw;
  m.mitigated_peak_mw = l.historical_peak_mw;
  m.demand_charge_baseline = monthly_demand_charge(l.baseline_peak_mw, tariff);
  m.demand_charge_mitigated = monthly_demand_charge(l.historical_peak_mw, tariff);
  m.operating_cost = l.operating_cost_dollars;
  m.dr_hours = l.dr_hours;
  m.battery_cycles = l.battery_cycles;
  m.dcm_days = l.dcm_days;
  m.payback_shift_days = l.payback_shift_days;
  m.savings = (l.baseline_peak_mw - l.historical_peak_mw) * kw_per_mw * tariff.demand_rate -
              l.operating_cost_dollars;
  m.negative_savings = m.savings < 0.0;
  m.payback_shift = l.historical_peak_mw > l.baseline_peak_mw + 1e-9 * std::max(1.0, l.baseline_peak_mw);
  return m;
}

// gate -> select hours -> optimize -> execute on actuals -> ledger, day by day.
inline AnnualReport simulate_year(const Scenario& sc, const SimulationConfig& cfg) {
  cfg.validate();
  if (sc.days.empty()) throw DataError("scenario has no days");
  if (sc.actual_temperature.size() != sc.days.size())
    throw DataError("scenario needs one actual temperature profile per day");
  const auto obj = cfg.objective();

  AnnualReport rep;
  rep.strategy = cfg.strategy;
  MonthLedger ledger;
  for (std::size_t i = 0; i < sc.days.size(); ++i) {
    const auto& ctx = sc.days[i];
    if (const auto v = validate_day_context(ctx); !v.empty())
      throw DataError("day " + ctx.date.iso() + ": " + v.front().field + " " + v.front().rule);
    if (i > 0 && !(sc.days[i - 1].date < ctx.date)) throw DataError("days out of order at " + ctx.date.iso());
    if (ledger.month_key != -1 && ledger.month_key != ctx.date.month_key())
      rep.months.push_back(close_month(ledger, cfg.tariff));
    ledger = ledger_for(ledger, ctx.date);

    DayRecord rec;
    rec.date = ctx.date;
    rec.baseline = ctx.actual_load;
    DayCosts costs;
    if (cfg.fleet.bess) costs.usable_energy_mwh = cfg.fleet.bess->usable_energy();
    if (!cfg.fleet.empty() && gate(ctx, ledger, cfg.gate) == GateDecision::run) {
      const auto hours = select_hours(cfg.strategy, ctx);
      auto sched = optimize(ctx, hours, cfg.fleet, obj, cfg.limits);
      rec.mitigated = evaluate_on_actual(sched, ctx.actual_load, sc.actual_temperature[i], cfg.fleet);
      if (cfg.fleet.dg) costs.operating_cost_dollars = dg_cost(sched.dg_mw, *cfg.fleet.dg);
      costs.dr_hours = tcl_dr_hour_count(sched.tcl_columns);
      if (cfg.fleet.bess)
        for (double b : sched.bess_mw) costs.discharged_mwh += b / cfg.fleet.bess->discharge_efficiency;
      costs.dcm_ran = true;
      rec.ran = true;
      rec.operating_cost = costs.operating_cost_dollars;
      rec.schedule = std::move(sched);
    } else {
      rec.mitigated = ctx.actual_load;
    }
    ledger = update_ledger(ledger, ctx.date, rec.mitigated, rec.baseline, costs);
    rep.days.push_back(std::move(rec));
  }
  rep.months.push_back(close_month(ledger, cfg.tariff));

  for (const auto& m : rep.months) {
    rep.demand_charge_baseline += m.demand_charge_baseline;
    rep.demand_charge_mitigated += m.demand_charge_mitigated;
    rep.operating_cost += m.operating_cost;
    rep.savings += m.savings;
    rep.battery_cycles += m.battery_cycles;
    rep.dr_hours += m.dr_hours;
    rep.dcm_days += m.dcm_days;
    if (m.payback_shift) ++rep.payback_shift_months;
  }
  return rep;
}

// Strategy comparison ---------------------------------------------------------

struct StrategyComparison {
  std::array<AnnualReport, 5> reports;
  std::array<double, 5> annual_savings{};
  std::array<double, 5> normalized{};  // annual savings / best annual savings
  bool degenerate = false;             // best savings <= 0, normalization undefined
  // Per month: index of the best strategy and whether each strategy is within
  // `close_fraction` of it.
  std::vector<int> month_best;
  std::vector<std::array<bool, 5>> month_close;
};

inline constexpr double close_fraction = 0.02;

inline StrategyComparison compare_strategies(const Scenario& sc, const SimulationConfig& base) {
  StrategyComparison cmp;
  for (std::size_t s = 0; s < all_strategies.size(); ++s) {
    SimulationConfig cfg = base;
    cfg.strategy.kind = all_strategies[s];
    if (!is_horizon(cfg.strategy.kind)) cfg.strategy.append_payback_hour = false;
    cmp.reports[s] = simulate_year(sc, cfg);
    cmp.annual_savings[s] = cmp.reports[s].savings;
  }
  const double best = *std::max_element(cmp.annual_savings.begin(), cmp.annual_savings.end());
  cmp.degenerate = !(best > 0.0);
  for (std::size_t s = 0; s < 5; ++s) cmp.normalized[s] = cmp.degenerate ? 0.0 : cmp.annual_savings[s] / best;

  const std::size_t months = cmp.reports[0].months.size();
  for (std::size_t m = 0; m < months; ++m) {
    int bi = 0;
    for (int s = 1; s < 5; ++s)
      if (cmp.reports[s].months[m].savings > cmp.reports[bi].months[m].savings) bi = s;
    const double bv = cmp.reports[bi].months[m].savings;
    std::array<bool, 5> close{};
    for (int s = 0; s < 5; ++s)
      close[s] = bv > 0.0 && cmp.reports[s].months[m].savings >= bv * (1.0 - close_fraction);
    cmp.month_best.push_back(bi);
    cmp.month_close.push_back(close);
  }
  return cmp;
}

// Sensitivity sweep --------------------------------------------------------------

enum class SweepResource { bess, dg };

struct SweepRow {
  double rating_mw = 0.0;
  double savings = 0.0;
  double marginal = 0.0;  // savings gained per MW since the previous rating (0 MW before the first)
  double battery_cycles = 0.0;
  double savings_per_cycle = 0.0;
  double operating_cost = 0.0;
};

// Single-resource fleet for a sweep point: a 2-hour battery or a generator.
inline Fleet sweep_fleet(const SimulationConfig& cfg, SweepResource kind, double rating) {
  Fleet f;
  if (rating <= 0.0) return f;
  if (kind == SweepResource::bess) {
    BessSpec b = cfg.fleet.bess.value_or(BessSpec{});
    b.power_max = rating;
    b.energy_min = 0.0;
    b.energy_max = 2.0 * rating;
    f.bess = b;
  } else {
    DgSpec g = cfg.fleet.dg.value_or(DgSpec{});
    g.power_max = rating;
    f.dg = g;
  }
  return f;
}

inline std::vector<SweepRow> sensitivity_sweep(const Scenario& sc, const SimulationConfig& base,
                                               SweepResource kind, const std::vector<double>& ratings) {
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (!(ratings[i] >= 0.0)) throw std::invalid_argument("sweep ratings must be >= 0");
    if (i > 0 && !(ratings[i] > ratings[i - 1]))
      throw std::invalid_argument("sweep ratings must be strictly increasing");
  }
  std::vector<std::future<AnnualReport>> jobs;
  for (double r : ratings) {
    SimulationConfig cfg = base;
    cfg.fleet = sweep_fleet(base, kind, r);
    jobs.push_back(std::async(std::launch::async, [&sc, cfg] { return simulate_year(sc, cfg); }));
  }
  std::vector<SweepRow> rows;
  double prev_rating = 0.0, prev_savings = 0.0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const auto rep = jobs[i].get();
    SweepRow row;
    row.rating_mw = ratings[i];
    row.savings = rep.savings;
    row.operating_cost = rep.operating_cost;
    row.battery_cycles = rep.battery_cycles;
    row.savings_per_cycle = rep.battery_cycles > 0.0 ? rep.savings / rep.battery_cycles : 0.0;
    const double dr = ratings[i] - prev_rating;
    row.marginal = dr > 0.0 ? (rep.savings - prev_savings) / dr : 0.0;
    prev_rating = ratings[i];
    prev_savings = rep.savings;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dcm
