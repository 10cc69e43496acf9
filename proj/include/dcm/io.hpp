#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dcm/simulation.hpp"

namespace dcm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

// Number formatting ------------------------------------------------------------

// Shortest decimal that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

inline std::string format_fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}
inline std::string money(double v) { return format_fixed(v, 2); }
inline std::string mw(double v) { return format_fixed(v, 4); }

inline double parse_double(std::string_view s) {
  double v = 0.0;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

// Time series CSV ----------------------------------------------------------------
//
// `timestamp,value` rows with an optional header, hourly and gap-free.

namespace detail {
inline std::vector<std::pair<std::size_t, std::string>> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.emplace_back(no, std::move(line));
  }
  return lines;
}

inline std::pair<std::string, std::string> split_row(const fs::path& path, std::size_t no,
                                                     const std::string& line) {
  const auto comma = line.find(',');
  if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
    throw DataError(path.string() + ":" + std::to_string(no) + ": malformed row (expected 2 fields)");
  return {line.substr(0, comma), line.substr(comma + 1)};
}
}  // namespace detail

inline HourlyProfile load_timeseries_csv(const fs::path& path) {
  const auto lines = detail::read_lines(path);
  std::vector<double> values;
  std::optional<Timestamp> first, prev;
  for (const auto& [no, line] : lines) {
    auto [ts_s, val_s] = detail::split_row(path, no, line);
    if (!first && !prev && ts_s == "timestamp") continue;
    const std::string where = path.string() + ":" + std::to_string(no) + ": ";
    Timestamp ts;
    double v;
    try {
      ts = Timestamp::parse(ts_s);
      v = parse_double(val_s);
    } catch (const std::invalid_argument& e) {
      throw DataError(where + "malformed row: " + e.what());
    }
    if (prev) {
      if (ts == *prev) throw DataError(where + "duplicate timestamp " + ts.iso());
      if (ts < *prev) throw DataError(where + "timestamp " + ts.iso() + " goes backwards");
      if (ts != prev->next())
        throw DataError(where + "gap: expected " + prev->next().iso() + ", found " + ts.iso());
    } else {
      first = ts;
    }
    prev = ts;
    values.push_back(v);
  }
  if (values.empty()) throw DataError(path.string() + ": no data rows");
  return HourlyProfile(std::move(values), *first);
}

struct DailySeries {
  Date start;
  std::vector<double> values;
};

// `date,value` rows, one per day, gap-free.
inline DailySeries load_daily_csv(const fs::path& path) {
  const auto lines = detail::read_lines(path);
  DailySeries out;
  std::optional<Date> prev;
  for (const auto& [no, line] : lines) {
    auto [d_s, val_s] = detail::split_row(path, no, line);
    if (!prev && out.values.empty() && d_s == "date") continue;
    const std::string where = path.string() + ":" + std::to_string(no) + ": ";
    Date d;
    double v;
    try {
      d = Date::parse(d_s);
      v = parse_double(val_s);
    } catch (const std::invalid_argument& e) {
      throw DataError(where + "malformed row: " + e.what());
    }
    if (prev) {
      if (d == *prev) throw DataError(where + "duplicate date " + d.iso());
      if (d < *prev) throw DataError(where + "date " + d.iso() + " goes backwards");
      if (d != prev->next()) throw DataError(where + "gap: expected " + prev->next().iso());
    } else {
      out.start = d;
    }
    prev = d;
    out.values.push_back(v);
  }
  if (out.values.empty()) throw DataError(path.string() + ": no data rows");
  return out;
}

namespace detail {
inline std::ofstream open_out(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}
}  // namespace detail

inline void write_timeseries_csv(const fs::path& path, const std::vector<HourlyProfile>& days) {
  auto f = detail::open_out(path);
  f << "timestamp,value\n";
  for (const auto& d : days) {
    Timestamp ts = d.start();
    for (double v : d.values()) {
      f << ts.iso() << ',' << format_exact(v) << '\n';
      ts = ts.next();
    }
  }
}

// Scenario directories -------------------------------------------------------------

inline constexpr const char* load_actual_file = "load_actual.csv";
inline constexpr const char* load_forecast_file = "load_forecast.csv";
inline constexpr const char* temperature_forecast_file = "temperature_forecast.csv";
inline constexpr const char* temperature_actual_file = "temperature_actual.csv";
inline constexpr const char* peak_hour_probability_file = "peak_hour_probability.csv";
inline constexpr const char* peak_day_probability_file = "peak_day_probability.csv";

inline void write_scenario_dir(const Scenario& sc, const fs::path& dir) {
  std::vector<HourlyProfile> actual, forecast, temp_fc, prob;
  for (const auto& d : sc.days) {
    actual.push_back(d.actual_load);
    forecast.push_back(d.forecast_load);
    temp_fc.push_back(d.temperature);
    prob.push_back(HourlyProfile(d.peak_hour_probabilities, Timestamp{d.date, 0}));
  }
  write_timeseries_csv(dir / load_actual_file, actual);
  write_timeseries_csv(dir / load_forecast_file, forecast);
  write_timeseries_csv(dir / temperature_forecast_file, temp_fc);
  write_timeseries_csv(dir / temperature_actual_file, sc.actual_temperature);
  write_timeseries_csv(dir / peak_hour_probability_file, prob);
  auto f = detail::open_out(dir / peak_day_probability_file);
  f << "date,value\n";
  for (const auto& d : sc.days) f << d.date.iso() << ',' << format_exact(d.peak_day_probability) << '\n';
  if (sc.params) {
    const auto& p = *sc.params;
    auto m = detail::open_out(dir / "scenario.ini");
    m << "[data]\nsource = synthetic\nseed = " << p.seed << "\nyear = " << p.year
      << "\nforecast_sigma = " << format_exact(p.forecast_sigma)
      << "\nprobability_fidelity = " << format_exact(p.probability_fidelity)
      << "\ntemperature_sigma = " << format_exact(p.temperature_sigma)
      << "\nbase_load_mw = " << format_exact(p.base_load_mw)
      << "\ncooling_mw_per_degc = " << format_exact(p.cooling_mw_per_degc)
      << "\nheating_mw_per_degc = " << format_exact(p.heating_mw_per_degc) << '\n';
  }
}

inline Scenario load_scenario_dir(const fs::path& dir) {
  const auto actual = load_timeseries_csv(dir / load_actual_file);
  const auto forecast = load_timeseries_csv(dir / load_forecast_file);
  const auto temp_fc = load_timeseries_csv(dir / temperature_forecast_file);
  const auto temp_act = load_timeseries_csv(dir / temperature_actual_file);
  const auto prob = load_timeseries_csv(dir / peak_hour_probability_file);
  const auto pday = load_daily_csv(dir / peak_day_probability_file);

  for (const auto* p : {&actual, &forecast, &temp_fc, &temp_act, &prob}) {
    if (p->start() != actual.start() || p->size() != actual.size())
      throw DataError("hourly series in " + dir.string() + " do not cover the same hours");
  }
  if (actual.start().hour != 0 || actual.size() % hours_per_day != 0)
    throw DataError("hourly series must cover whole days starting at hour 00");
  const std::size_t ndays = actual.size() / hours_per_day;
  if (pday.start != actual.start().date || pday.values.size() != ndays)
    throw DataError("peak_day_probability.csv does not match the hourly series days");

  Scenario sc;
  for (std::size_t d = 0; d < ndays; ++d) {
    DayContext ctx;
    ctx.actual_load = actual.day(d);
    ctx.date = ctx.actual_load.start().date;
    ctx.forecast_load = forecast.day(d);
    ctx.temperature = temp_fc.day(d);
    const auto pr = prob.day(d);
    ctx.peak_hour_probabilities.assign(pr.values().begin(), pr.values().end());
    ctx.peak_day_probability = pday.values[d];
    if (const auto v = validate_day_context(ctx); !v.empty())
      throw DataError("day " + ctx.date.iso() + ": " + v.front().field + " " + v.front().rule);
    sc.days.push_back(std::move(ctx));
    sc.actual_temperature.push_back(temp_act.day(d));
  }
  return sc;
}

// Run configuration -------------------------------------------------------------------

struct DataSource {
  enum class Kind { synthetic, csv } kind = Kind::synthetic;
  ScenarioParams params;
  fs::path dir;
};

struct RunConfig {
  SimulationConfig sim;
  DataSource data;
  fs::path output_dir = "out";
};

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const double d = parse_double(item);
      if (d != std::floor(d)) throw std::invalid_argument("not an integer");
      out.push_back(static_cast<int>(d));
    } catch (const std::invalid_argument&) {
      throw ConfigError(key + ": bad integer list '" + v + "'");
    }
  }
  return out;
}

// Typed accessors over one INI section; every key read is recorded so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(std::string name, const boost::property_tree::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    if (auto v = tree_->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'))) {
      std::string s = *v;
      for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == ';' && std::isspace(static_cast<unsigned char>(s[i - 1]))) {
          s.resize(i);  // inline comment
          break;
        }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      return s;
    }
    return std::nullopt;
  }

  void number(const std::string& key, double& dst) {
    if (auto v = raw(key)) {
      try {
        dst = parse_double(*v);
      } catch (const std::invalid_argument&) {
        throw ConfigError(where(key) + ": expected a number, got '" + *v + "'");
      }
    }
  }

  void integer(const std::string& key, int& dst) {
    double d = dst;
    number(key, d);
    if (d != std::floor(d)) throw ConfigError(where(key) + ": expected an integer");
    dst = static_cast<int>(d);
  }

  void count(const std::string& key, std::size_t& dst) {
    double d = static_cast<double>(dst);
    number(key, d);
    if (d < 0 || d != std::floor(d)) throw ConfigError(where(key) + ": expected a non-negative integer");
    dst = static_cast<std::size_t>(d);
  }

  void flag(const std::string& key, bool& dst) {
    if (auto v = raw(key)) dst = parse_bool(where(key), *v);
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [k, _] : *tree_)
      if (!used_.count(k)) throw ConfigError("unknown key " + where(k));
  }

 private:
  std::string name_;
  const boost::property_tree::ptree* tree_;
  std::set<std::string> used_;
};

}  // namespace detail

// Flat INI: one section per module. Unknown sections and keys are errors.
inline RunConfig parse_run_config(std::istream& in, const fs::path& base_dir = ".") {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  boost::property_tree::ptree root;
  try {
    std::istringstream body(text);
    boost::property_tree::ini_parser::read_ini(body, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  // The INI reader drops sections without keys; catch misspelled ones anyway.
  std::vector<std::string> headers;
  {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto a = line.find_first_not_of(" \t");
      const auto b = line.find_last_not_of(" \t\r");
      if (a != std::string::npos && line[a] == '[' && line[b] == ']')
        headers.push_back(line.substr(a + 1, b - a - 1));
    }
  }

  std::map<std::string, const boost::property_tree::ptree*> sections;
  for (const auto& [name, child] : root) {
    if (child.empty() && !child.data().empty()) throw ConfigError("key '" + name + "' outside any section");
    sections[name] = &child;
  }
  std::set<std::string> seen;
  auto section = [&](const std::string& name) {
    seen.insert(name);
    auto it = sections.find(name);
    return detail::Section(name, it == sections.end() ? nullptr : it->second);
  };
  auto has = [&](const std::string& name) { return sections.count(name) > 0; };

  RunConfig rc;
  auto& sim = rc.sim;

  {
    auto s = section("data");
    if (auto v = s.raw("source")) {
      if (*v == "synthetic") rc.data.kind = DataSource::Kind::synthetic;
      else if (*v == "csv") rc.data.kind = DataSource::Kind::csv;
      else throw ConfigError(s.where("source") + ": expected synthetic or csv");
    }
    double seed = static_cast<double>(rc.data.params.seed);
    s.number("seed", seed);
    if (seed < 0 || seed != std::floor(seed)) throw ConfigError(s.where("seed") + ": expected a non-negative integer");
    rc.data.params.seed = static_cast<std::uint64_t>(seed);
    s.integer("year", rc.data.params.year);
    s.number("forecast_sigma", rc.data.params.forecast_sigma);
    s.number("probability_fidelity", rc.data.params.probability_fidelity);
    s.number("temperature_sigma", rc.data.params.temperature_sigma);
    s.number("base_load_mw", rc.data.params.base_load_mw);
    s.number("cooling_mw_per_degc", rc.data.params.cooling_mw_per_degc);
    s.number("heating_mw_per_degc", rc.data.params.heating_mw_per_degc);
    if (auto v = s.raw("dir")) {
      fs::path p(*v);
      rc.data.dir = p.is_absolute() ? p : base_dir / p;
    }
    s.check_unknown();
    if (!(rc.data.params.probability_fidelity >= 0.0 && rc.data.params.probability_fidelity <= 1.0))
      throw ConfigError("[data] probability_fidelity must be in [0,1]");
    if (!(rc.data.params.forecast_sigma >= 0.0) || !(rc.data.params.temperature_sigma >= 0.0))
      throw ConfigError("[data] noise std-devs must be >= 0");
    if (rc.data.kind == DataSource::Kind::csv) {
      if (rc.data.dir.empty()) throw ConfigError("[data] source = csv needs dir");
      for (const char* f : {load_actual_file, load_forecast_file, temperature_forecast_file,
                            temperature_actual_file, peak_hour_probability_file, peak_day_probability_file})
        if (!fs::exists(rc.data.dir / f)) throw ConfigError("[data] missing file " + (rc.data.dir / f).string());
    }
  }

  auto optional_resource = [&](const std::string& name, auto& slot, auto&& read) {
    auto s = section(name);
    bool enabled = slot.has_value();
    s.flag("enabled", enabled);
    auto spec = slot.value_or(typename std::remove_reference_t<decltype(slot)>::value_type{});
    read(s, spec);
    s.check_unknown();
    if (enabled) slot = spec;
    else slot.reset();
  };
  optional_resource("bess", sim.fleet.bess, [](detail::Section& s, BessSpec& b) {
    s.number("power_max_mw", b.power_max);
    s.number("energy_max_mwh", b.energy_max);
    s.number("energy_min_mwh", b.energy_min);
    s.number("efficiency", b.discharge_efficiency);
  });
  optional_resource("dg", sim.fleet.dg, [](detail::Section& s, DgSpec& g) {
    s.number("power_max_mw", g.power_max);
    s.number("fuel_cost_per_kwh", g.fuel_cost);
    s.number("energy_price_per_kwh", g.energy_price);
  });
  optional_resource("cvr", sim.fleet.cvr, [](detail::Section& s, CvrSpec& c) {
    s.number("k1", c.k1);
    s.number("k2", c.k2);
    s.integer("max_run_hours", c.max_run_hours);
    s.integer("recovery_hours", c.recovery_hours);
  });

  {
    auto s = section("tcl");
    bool enabled = !sim.fleet.tcl_groups.empty();
    s.flag("enabled", enabled);
    if (auto v = s.raw("months")) {
      sim.fleet.tcl_months = {};
      for (int m : detail::parse_int_list(s.where("months"), *v)) {
        if (m < 1 || m > 12) throw ConfigError(s.where("months") + ": month out of range 1..12");
        sim.fleet.tcl_months[m - 1] = true;
      }
    }
    s.check_unknown();

    std::vector<TclGroupSpec> groups;
    for (int g = 1; has("tcl_group" + std::to_string(g)); ++g) {
      auto gs = section("tcl_group" + std::to_string(g));
      TclGroupSpec spec = g == 2 ? TclGroupSpec::full_off() : TclGroupSpec::cycling();
      if (auto v = gs.raw("kind")) {
        if (*v == "cycling") spec = TclGroupSpec::cycling();
        else if (*v == "full_off") spec = TclGroupSpec::full_off();
        else throw ConfigError(gs.where("kind") + ": expected cycling or full_off");
      }
      gs.number("units", spec.unit_count);
      gs.number("rated_kw", spec.rated_power_kw);
      gs.number("scale_factor", spec.scale_factor);
      gs.integer("max_consecutive_hours", spec.max_consecutive_hours);
      gs.number("balance_temp", spec.balance_temp);
      gs.number("design_temp", spec.design_temp);
      gs.number("kappa", spec.payback_recovery_fraction);
      gs.check_unknown();
      groups.push_back(spec);
    }
    if (!groups.empty()) sim.fleet.tcl_groups = groups;
    if (!enabled) sim.fleet.tcl_groups.clear();
  }

  {
    auto s = section("gate");
    s.number("error_margin", sim.gate.error_margin);
    s.number("peak_day_threshold", sim.gate.peak_day_prob_threshold);
    s.check_unknown();
  }
  {
    auto s = section("strategy");
    if (auto v = s.raw("kind")) {
      auto k = parse_strategy(*v);
      if (!k) throw ConfigError(s.where("kind") + ": expected s1..s5");
      sim.strategy.kind = *k;
    }
    s.integer("x", sim.strategy.x);
    s.flag("payback_hour", sim.strategy.append_payback_hour);
    s.check_unknown();
  }
  {
    auto s = section("objective");
    s.number("beta_f1", sim.beta_f1);
    s.number("beta_f2", sim.beta_f2);
    s.number("tcl_hour_penalty", sim.tcl_hour_penalty);
    s.count("enumeration_budget", sim.limits.enumeration_budget);
    s.count("node_limit", sim.limits.node_limit);
    s.check_unknown();
  }
  {
    auto s = section("tariff");
    s.number("demand_rate", sim.tariff.demand_rate);
    s.check_unknown();
  }
  {
    auto s = section("output");
    if (auto v = s.raw("dir")) {
      fs::path p(*v);
      rc.output_dir = p.is_absolute() ? p : base_dir / p;
    }
    s.check_unknown();
  }

  for (const auto& name : headers)
    if (!seen.count(name)) throw ConfigError("unknown section [" + name + "]");

  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_run_config(in, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

inline Scenario load_scenario(const DataSource& src) {
  if (src.kind == DataSource::Kind::csv) return load_scenario_dir(src.dir);
  return generate_synthetic_scenario(src.params);
}

// Reports ---------------------------------------------------------------------------

inline std::string month_label(int year, int month) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

inline void write_monthly_csv(const AnnualReport& rep, const fs::path& path) {
  auto f = detail::open_out(path);
  f << "month,baseline_peak_mw,mitigated_peak_mw,demand_charge_baseline,demand_charge_mitigated,"
       "operating_cost,savings,dr_hours,battery_cycles,dcm_days,payback_shift_days,negative_savings,"
       "payback_shift\n";
  for (const auto& m : rep.months)
    f << month_label(m.year, m.month) << ',' << mw(m.baseline_peak_mw) << ',' << mw(m.mitigated_peak_mw) << ','
      << money(m.demand_charge_baseline) << ',' << money(m.demand_charge_mitigated) << ','
      << money(m.operating_cost) << ',' << money(m.savings) << ',' << m.dr_hours << ','
      << format_fixed(m.battery_cycles, 4) << ',' << m.dcm_days << ',' << m.payback_shift_days << ','
      << (m.negative_savings ? 1 : 0) << ',' << (m.payback_shift ? 1 : 0) << '\n';
}

inline void write_dispatch_csv(const DayRecord& rec, const DayContext& ctx, const Fleet& fleet,
                               const fs::path& path) {
  auto f = detail::open_out(path);
  const auto& s = *rec.schedule;
  f << "timestamp,targeted,payback_hour,forecast_mw,actual_mw,bess_mw,dg_mw,cvr_on";
  for (std::size_t g = 0; g < fleet.tcl_groups.size(); ++g) f << ",tcl" << g + 1 << "_on";
  f << ",predicted_residual_mw,mitigated_mw\n";
  const auto& hrs = s.hours.hours();
  const auto dep = s.hours.deployable();
  for (int h = 0; h < hours_per_day; ++h) {
    const auto it = std::find(hrs.begin(), hrs.end(), h);
    const bool targeted = it != hrs.end();
    const std::size_t i = targeted ? static_cast<std::size_t>(it - hrs.begin()) : 0;
    const auto jt = std::find(dep.begin(), dep.end(), h);
    const bool deployable = jt != dep.end();
    const std::size_t j = deployable ? static_cast<std::size_t>(jt - dep.begin()) : 0;
    const bool payback = targeted && s.hours.payback_hour_appended() && h == hrs.back();
    f << Timestamp{rec.date, h}.iso() << ',' << (targeted ? 1 : 0) << ',' << (payback ? 1 : 0) << ','
      << mw(ctx.forecast_load[h]) << ',' << mw(ctx.actual_load[h]) << ',' << mw(targeted ? s.bess_mw[i] : 0.0)
      << ',' << mw(targeted ? s.dg_mw[i] : 0.0) << ','
      << (deployable && !s.cvr_column.empty() ? static_cast<int>(s.cvr_column[j]) : 0);
    for (std::size_t g = 0; g < fleet.tcl_groups.size(); ++g)
      f << ',' << (deployable ? static_cast<int>(s.tcl_columns[g][j]) : 0);
    f << ',' << (targeted ? mw(s.predicted_residual[i]) : std::string()) << ',' << mw(rec.mitigated[h]) << '\n';
  }
}

inline std::string describe(const StrategyChoice& c) {
  std::string s(short_name(c.kind));
  s += " x=" + std::to_string(c.x);
  if (is_horizon(c.kind)) s += std::string(" payback_hour=") + (c.append_payback_hour ? "on" : "off");
  return s;
}

inline void write_summary(const AnnualReport& rep, const fs::path& path) {
  auto f = detail::open_out(path);
  f << "strategy: " << describe(rep.strategy) << '\n'
    << "months: " << rep.months.size() << '\n'
    << "dcm days: " << rep.dcm_days << '\n'
    << "demand charge baseline ($): " << money(rep.demand_charge_baseline) << '\n'
    << "demand charge mitigated ($): " << money(rep.demand_charge_mitigated) << '\n'
    << "operating cost ($): " << money(rep.operating_cost) << '\n'
    << "savings ($): " << money(rep.savings) << '\n'
    << "dr hours: " << rep.dr_hours << '\n'
    << "battery cycles: " << format_fixed(rep.battery_cycles, 4) << '\n'
    << "payback shift months: " << rep.payback_shift_months << '\n'
    << "negative savings months: "
    << std::count_if(rep.months.begin(), rep.months.end(), [](const auto& m) { return m.negative_savings; })
    << '\n'
    << "battery charging cost included: " << (rep.charging_cost_included ? "yes" : "no") << '\n'
    << "tcl customer compensation included: " << (rep.tcl_compensation_included ? "yes" : "no") << '\n';
}

// monthly.csv, dispatch/<date>.csv for every day DCM ran, summary.txt and plotdata/.
inline void emit_reports(const AnnualReport& rep, const Scenario& sc, const Fleet& fleet, const fs::path& outdir) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec || !fs::is_directory(outdir)) throw std::runtime_error("cannot create output directory " + outdir.string());
  write_monthly_csv(rep, outdir / "monthly.csv");
  for (std::size_t d = 0; d < rep.days.size(); ++d)
    if (rep.days[d].ran)
      write_dispatch_csv(rep.days[d], sc.days[d], fleet, outdir / "dispatch" / (rep.days[d].date.iso() + ".csv"));
  write_summary(rep, outdir / "summary.txt");
  auto f = detail::open_out(outdir / "plotdata" / "monthly_peaks.csv");
  f << "month,baseline_peak_mw,mitigated_peak_mw,savings\n";
  for (const auto& m : rep.months)
    f << month_label(m.year, m.month) << ',' << mw(m.baseline_peak_mw) << ',' << mw(m.mitigated_peak_mw) << ','
      << money(m.savings) << '\n';
}

struct ComparisonCase {
  std::string year;    // scenario label (seed or data directory)
  std::string rating;  // MW for single-resource fleets, "fleet" for the configured fleet
  StrategyComparison result;
};

inline void emit_comparison(const std::vector<ComparisonCase>& cases, const fs::path& outdir) {
  auto f = detail::open_out(outdir / "compare.csv");
  f << "year,rating_mw,strategy";
  for (int m = 1; m <= 12; ++m) f << ",m" << (m < 10 ? "0" : "") << m;
  f << ",annual_savings,normalized\n";
  auto w = detail::open_out(outdir / "winners.csv");
  w << "year,rating_mw,month,best,close\n";
  auto h = detail::open_out(outdir / "plotdata" / "normalized_savings.csv");
  h << "year,rating_mw,S1,S2,S3,S4,S5,degenerate\n";
  for (const auto& c : cases) {
    const auto& r = c.result;
    for (std::size_t s = 0; s < 5; ++s) {
      f << c.year << ',' << c.rating << ',' << short_name(all_strategies[s]);
      for (const auto& m : r.reports[s].months) f << ',' << money(m.savings);
      for (std::size_t m = r.reports[s].months.size(); m < 12; ++m) f << ',';
      f << ',' << money(r.annual_savings[s]) << ',' << format_fixed(r.normalized[s], 6) << '\n';
    }
    for (std::size_t m = 0; m < r.month_best.size(); ++m) {
      const auto& mr = r.reports[0].months[m];
      w << c.year << ',' << c.rating << ',' << month_label(mr.year, mr.month) << ','
        << short_name(all_strategies[r.month_best[m]]) << ',';
      bool first = true;
      for (std::size_t s = 0; s < 5; ++s)
        if (r.month_close[m][s] && static_cast<int>(s) != r.month_best[m]) {
          w << (first ? "" : ";") << short_name(all_strategies[s]);
          first = false;
        }
      w << '\n';
    }
    h << c.year << ',' << c.rating;
    for (double v : r.normalized) h << ',' << format_fixed(v, 6);
    h << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

inline void emit_sweep(const std::vector<SweepRow>& rows, SweepResource kind, const fs::path& outdir) {
  auto f = detail::open_out(outdir / "sweep.csv");
  f << "rating_mw,annual_savings,marginal_per_mw,operating_cost,battery_cycles,savings_per_cycle\n";
  for (const auto& r : rows)
    f << mw(r.rating_mw) << ',' << money(r.savings) << ',' << money(r.marginal) << ',' << money(r.operating_cost)
      << ',' << format_fixed(r.battery_cycles, 4) << ','
      << (kind == SweepResource::bess ? money(r.savings_per_cycle) : std::string()) << '\n';
  auto p = detail::open_out(outdir / "plotdata" / "savings_vs_rating.csv");
  p << "rating_mw,annual_savings,marginal_per_mw\n";
  for (const auto& r : rows) p << mw(r.rating_mw) << ',' << money(r.savings) << ',' << money(r.marginal) << '\n';
}

}  // namespace dcm
