#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcm/io.hpp"

namespace dcm {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_data = 2 };

// Output directory: config file, then $DCM_OUTPUT_DIR, then --out.
inline fs::path resolve_output_dir(const RunConfig& rc, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DCM_OUTPUT_DIR"); env && *env) return env;
  return rc.output_dir;
}

namespace detail {

struct CliOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string strategy;
  std::optional<int> x;
  std::string payback_hour;
  std::string resource = "bess";
  std::vector<double> ratings;
  int years = 1;
  std::string date;
};

inline void add_common(CLI::App* sub, CliOptions& o) {
  sub->add_option("--config", o.config, "INI run configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "synthetic scenario seed");
  sub->add_option("--out", o.out, "output directory");
}

inline void add_strategy(CLI::App* sub, CliOptions& o) {
  sub->add_option("--strategy", o.strategy, "s1|s2|s3|s4|s5")
      ->check(CLI::IsMember({"s1", "s2", "s3", "s4", "s5"}, CLI::ignore_case));
  sub->add_option("--x", o.x, "number of top hours")->check(CLI::Range(1, 24));
  sub->add_option("--payback-hour", o.payback_hour, "append a payback hour to horizon strategies (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
}

inline void add_sweep(CLI::App* sub, CliOptions& o, bool with_default) {
  sub->add_option("--resource", o.resource, "bess|dg")->check(CLI::IsMember({"bess", "dg"}));
  auto* r = sub->add_option("--ratings", o.ratings, "comma separated MW ratings")->delimiter(',');
  if (with_default) r->default_str("100,200,300,400,500");
}

inline RunConfig build_config(const CliOptions& o) {
  RunConfig rc = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) {
    if (rc.data.kind == DataSource::Kind::csv) throw ConfigError("--seed needs a synthetic data source");
    rc.data.params.seed = *o.seed;
  }
  auto& st = rc.sim.strategy;
  if (!o.strategy.empty()) st.kind = *parse_strategy(o.strategy);
  if (o.x) st.x = *o.x;
  if (!o.payback_hour.empty()) st.append_payback_hour = o.payback_hour == "on";
  if (!is_horizon(st.kind) && o.payback_hour.empty()) st.append_payback_hour = false;
  try {
    rc.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

inline SweepResource resource_of(const std::string& s) {
  return s == "dg" ? SweepResource::dg : SweepResource::bess;
}

inline void print_report(const AnnualReport& rep, std::ostream& out) {
  out << "strategy " << describe(rep.strategy) << "\n"
      << "month      baseline_mw   mitigated_mw   savings_$\n";
  for (const auto& m : rep.months) {
    char line[128];
    std::snprintf(line, sizeof line, "%s  %12s  %13s  %12s%s\n", month_label(m.year, m.month).c_str(),
                  mw(m.baseline_peak_mw).c_str(), mw(m.mitigated_peak_mw).c_str(), money(m.savings).c_str(),
                  m.payback_shift ? "  payback shift" : "");
    out << line;
  }
  out << "annual savings $" << money(rep.savings) << ", operating cost $" << money(rep.operating_cost)
      << ", dcm days " << rep.dcm_days << "\n";
}

inline int cmd_gen(const CliOptions& o, std::ostream& out) {
  const RunConfig rc = build_config(o);
  if (rc.data.kind != DataSource::Kind::synthetic) throw ConfigError("gen needs a synthetic data source");
  const fs::path dir = resolve_output_dir(rc, o.out);
  write_scenario_dir(generate_synthetic_scenario(rc.data.params), dir);
  out << "scenario written to " << dir.string() << "\n";
  return exit_ok;
}

inline int cmd_run(const CliOptions& o, std::ostream& out) {
  const RunConfig rc = build_config(o);
  const Scenario sc = load_scenario(rc.data);
  const auto rep = simulate_year(sc, rc.sim);
  const fs::path dir = resolve_output_dir(rc, o.out);
  emit_reports(rep, sc, rc.sim.fleet, dir);
  print_report(rep, out);
  return exit_ok;
}

inline int cmd_compare(const CliOptions& o, std::ostream& out) {
  const RunConfig rc = build_config(o);
  if (o.years < 1) throw ConfigError("--years must be >= 1");
  if (o.years > 1 && rc.data.kind != DataSource::Kind::synthetic)
    throw ConfigError("--years needs a synthetic data source");

  std::vector<ComparisonCase> cases;
  for (int y = 0; y < o.years; ++y) {
    DataSource src = rc.data;
    src.params.seed += static_cast<std::uint64_t>(y);
    const Scenario sc = load_scenario(src);
    const std::string label =
        src.kind == DataSource::Kind::synthetic ? "seed" + std::to_string(src.params.seed) : src.dir.filename().string();
    if (o.ratings.empty()) {
      cases.push_back({label, "fleet", compare_strategies(sc, rc.sim)});
    } else {
      for (double r : o.ratings) {
        SimulationConfig cfg = rc.sim;
        cfg.fleet = sweep_fleet(rc.sim, resource_of(o.resource), r);
        cases.push_back({label, mw(r), compare_strategies(sc, cfg)});
      }
    }
  }
  const fs::path dir = resolve_output_dir(rc, o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  emit_comparison(cases, dir);

  for (const auto& c : cases) {
    out << c.year << " rating " << c.rating << (c.result.degenerate ? " (no positive savings)" : "") << "\n";
    out << "     ";
    for (int m = 1; m <= 12; ++m) {
      char h[16];
      std::snprintf(h, sizeof h, "%12s", ("m" + std::string(m < 10 ? "0" : "") + std::to_string(m)).c_str());
      out << h;
    }
    out << "      annual   norm\n";
    for (std::size_t s = 0; s < 5; ++s) {
      out << short_name(all_strategies[s]) << "   ";
      for (const auto& m : c.result.reports[s].months) {
        char v[24];
        std::snprintf(v, sizeof v, "%12.0f", m.savings);
        out << v;
      }
      char tail[64];
      std::snprintf(tail, sizeof tail, "%12.0f  %5.3f\n", c.result.annual_savings[s], c.result.normalized[s]);
      out << tail;
    }
    out << "best:";
    for (int b : c.result.month_best) out << ' ' << short_name(all_strategies[b]);
    out << "\n";
  }
  return exit_ok;
}

inline int cmd_sweep(const CliOptions& o, std::ostream& out) {
  const RunConfig rc = build_config(o);
  std::vector<double> ratings = o.ratings;
  if (ratings.empty()) ratings = {100, 200, 300, 400, 500};
  const Scenario sc = load_scenario(rc.data);
  std::vector<SweepRow> rows;
  try {
    rows = sensitivity_sweep(sc, rc.sim, resource_of(o.resource), ratings);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = resolve_output_dir(rc, o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  emit_sweep(rows, resource_of(o.resource), dir);
  out << o.resource << " rating_mw   annual_savings_$   marginal_$/MW   cycles\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%12.1f  %17s  %14s  %7.2f\n", r.rating_mw, money(r.savings).c_str(),
                  money(r.marginal).c_str(), r.battery_cycles);
    out << line;
  }
  return exit_ok;
}

// Dispatch for one day. Days the gate skips are optimized anyway so the
// schedule can be inspected.
inline int cmd_day(const CliOptions& o, std::ostream& out) {
  const RunConfig rc = build_config(o);
  Date date;
  try {
    date = Date::parse(o.date);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--date: ") + e.what());
  }
  const Scenario sc = load_scenario(rc.data);
  const auto it = std::find_if(sc.days.begin(), sc.days.end(), [&](const auto& d) { return d.date == date; });
  if (it == sc.days.end()) throw DataError("date " + date.iso() + " not in scenario");
  const std::size_t d = static_cast<std::size_t>(it - sc.days.begin());

  const auto rep = simulate_year(sc, rc.sim);
  DayRecord rec = rep.days[d];
  if (!rec.ran) {
    const auto hours = select_hours(rc.sim.strategy, *it);
    auto sched = optimize(*it, hours, rc.sim.fleet, rc.sim.objective(), rc.sim.limits);
    rec.mitigated = evaluate_on_actual(sched, it->actual_load, sc.actual_temperature[d], rc.sim.fleet);
    rec.schedule = std::move(sched);
  }
  out << date.iso() << " gate " << (rep.days[d].ran ? "run" : "skip (forced dispatch shown)") << ", "
      << describe(rc.sim.strategy) << "\n";
  const auto& s = *rec.schedule;
  out << "objective " << format_fixed(s.objective_value, 2) << ", predicted peak " << mw(s.predicted_peak_mw)
      << " MW" << (s.uniform_weights ? ", uniform weights" : "") << "\n";

  const fs::path path = fs::temp_directory_path() / ("dcm_day_" + date.iso() + ".csv");
  write_dispatch_csv(rec, *it, rc.sim.fleet, path);
  std::ifstream in(path);
  out << in.rdbuf();
  in.close();
  fs::remove(path);
  return exit_ok;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Coordinated demand-charge mitigation simulator"};
  app.require_subcommand(1);
  detail::CliOptions o;

  auto* gen = app.add_subcommand("gen", "write a synthetic scenario as CSV files");
  detail::add_common(gen, o);
  auto* run = app.add_subcommand("run", "simulate one strategy over the scenario year");
  detail::add_common(run, o);
  detail::add_strategy(run, o);
  auto* cmp = app.add_subcommand("compare", "compare S1-S5 month by month");
  detail::add_common(cmp, o);
  detail::add_strategy(cmp, o);
  detail::add_sweep(cmp, o, false);
  cmp->add_option("--years", o.years, "number of consecutive seeds to compare");
  auto* sweep = app.add_subcommand("sweep", "annual savings against BESS or DG rating");
  detail::add_common(sweep, o);
  detail::add_strategy(sweep, o);
  detail::add_sweep(sweep, o, true);
  auto* day = app.add_subcommand("day", "dump the dispatch of one day");
  detail::add_common(day, o);
  detail::add_strategy(day, o);
  day->add_option("--date", o.date, "YYYY-MM-DD")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_config;
  }

  try {
    if (*gen) return detail::cmd_gen(o, out);
    if (*run) return detail::cmd_run(o, out);
    if (*cmp) return detail::cmd_compare(o, out);
    if (*sweep) return detail::cmd_sweep(o, out);
    if (*day) return detail::cmd_day(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (const SearchBudgetError& e) {
    err << "search budget exceeded: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  }
  return exit_config;
}

}  // namespace dcm
