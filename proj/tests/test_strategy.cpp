#include <gtest/gtest.h>

#include "dcm/strategy.hpp"
#include "oracle.hpp"

using namespace dcm;

namespace {
DayContext day_with_peaks() {
  auto ctx = oracle::flat_day(1000.0, 30.0);
  std::vector<double> load(24, 1000.0), prob(24, 0.0);
  load[14] = 1100;
  load[15] = 1150;
  load[16] = 1120;
  prob[17] = 0.5;
  prob[18] = 0.3;
  prob[16] = 0.1;
  ctx.forecast_load = HourlyProfile(load, {ctx.date, 0});
  ctx.peak_hour_probabilities = prob;
  return ctx;
}
}  // namespace

TEST(Gate, TruthTable) {
  auto ctx = oracle::flat_day(1000.0, 30.0);
  MonthLedger l;
  l.month_key = ctx.date.month_key();
  const GateConfig cfg;
  for (bool peak : {false, true})
    for (bool prob : {false, true}) {
      l.historical_peak_mw = peak ? 1000.0 : 1200.0;
      ctx.peak_day_probability = prob ? 0.5 : 0.49;
      EXPECT_EQ(gate(ctx, l, cfg), peak && prob ? GateDecision::run : GateDecision::skip)
          << "peak " << peak << " prob " << prob;
    }
}

TEST(Gate, ErrorMarginBoundaryIsStrict) {
  auto ctx = oracle::flat_day(1000.0, 30.0);
  MonthLedger l;
  l.historical_peak_mw = 1100.0;
  EXPECT_EQ(gate(ctx, l, GateConfig{}), GateDecision::skip);
  l.historical_peak_mw = 1099.999;
  EXPECT_EQ(gate(ctx, l, GateConfig{}), GateDecision::run);
}

TEST(Strategy, HourSelection) {
  const auto ctx = day_with_peaks();
  auto pick = [&](StrategyKind k, bool pb = false) {
    StrategyChoice c;
    c.kind = k;
    c.append_payback_hour = pb;
    return select_hours(c, ctx);
  };
  EXPECT_EQ(pick(StrategyKind::s1_prob_top_x).hours(), (std::vector<int>{17, 18}));
  EXPECT_EQ(pick(StrategyKind::s2_dalf_top_x).hours(), (std::vector<int>{15, 16}));
  EXPECT_EQ(pick(StrategyKind::s3_prob_horizon).hours(), (std::vector<int>{17, 18}));
  EXPECT_EQ(pick(StrategyKind::s4_dalf_horizon).hours(), (std::vector<int>{15, 16}));
  EXPECT_EQ(pick(StrategyKind::s5_combined_horizon).hours(), (std::vector<int>{15, 16, 17, 18}));
  const auto pb = pick(StrategyKind::s5_combined_horizon, true);
  EXPECT_EQ(pb.hours(), (std::vector<int>{15, 16, 17, 18, 19}));
  EXPECT_TRUE(pb.payback_hour_appended());
  EXPECT_EQ(pb.deployable().back(), 18);
}

TEST(Strategy, PaybackHourClippedAtEndOfDay) {
  auto ctx = oracle::flat_day(1000.0, 30.0);
  std::vector<double> prob(24, 0.0);
  prob[22] = 0.4;
  prob[23] = 0.5;
  ctx.peak_hour_probabilities = prob;
  StrategyChoice c{StrategyKind::s3_prob_horizon, 2, true};
  const auto h = select_hours(c, ctx);
  EXPECT_EQ(h.hours(), (std::vector<int>{22, 23}));
  EXPECT_TRUE(h.payback_clipped());
  EXPECT_FALSE(h.payback_hour_appended());
}

TEST(Strategy, PaybackHourOnlyForHorizons) {
  StrategyChoice c{StrategyKind::s1_prob_top_x, 2, true};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_strategy("s4"), StrategyKind::s4_dalf_horizon);
  EXPECT_EQ(parse_strategy("S2"), StrategyKind::s2_dalf_top_x);
  EXPECT_FALSE(parse_strategy("s6"));
}

TEST(Ledger, AccumulatesAndResetsOnNewMonth) {
  const HourlyProfile base(std::vector<double>(24, 1000.0), {{2020, 7, 31}, 0});
  const HourlyProfile mit(std::vector<double>(24, 990.0), {{2020, 7, 31}, 0});
  DayCosts costs{500.0, 2, 10.0, 20.0, true};
  auto l = update_ledger(MonthLedger{}, {2020, 7, 31}, mit, base, costs);
  EXPECT_DOUBLE_EQ(l.historical_peak_mw, 990.0);
  EXPECT_DOUBLE_EQ(l.baseline_peak_mw, 1000.0);
  EXPECT_DOUBLE_EQ(l.battery_cycles, 0.5);
  EXPECT_EQ(l.dcm_days, 1);
  l = update_ledger(l, {2020, 7, 31}, base, mit, DayCosts{});
  EXPECT_EQ(l.payback_shift_days, 1);
  EXPECT_DOUBLE_EQ(l.operating_cost_dollars, 500.0);
  const auto fresh = ledger_for(l, {2020, 8, 1});
  EXPECT_DOUBLE_EQ(fresh.historical_peak_mw, 0.0);
  EXPECT_EQ(fresh.dr_hours, 0);
}
