#include <gtest/gtest.h>

#include <random>

#include "dcm/tcl.hpp"
#include "oracle.hpp"

using namespace dcm;

namespace {
std::vector<double> flat(double t) { return std::vector<double>(24, t); }
}  // namespace

TEST(Tcl, DutyCycleIsLinearAndClamped) {
  const auto g = TclGroupSpec::cycling();
  EXPECT_DOUBLE_EQ(duty_cycle(18.0, g), 0.0);
  EXPECT_DOUBLE_EQ(duty_cycle(29.0, g), 0.5);
  EXPECT_DOUBLE_EQ(duty_cycle(40.0, g), 1.0);
  EXPECT_DOUBLE_EQ(duty_cycle(10.0, g), 0.0);
  EXPECT_DOUBLE_EQ(duty_cycle(45.0, g), 1.0);
}

TEST(Tcl, CapacityOfDefaultGroup) { EXPECT_DOUBLE_EQ(TclGroupSpec::cycling().capacity_mw(), 150.0); }

TEST(Tcl, CyclingShedsOnlyAboveTwoThirds) {
  const auto g = TclGroupSpec::cycling();
  EXPECT_DOUBLE_EQ(tcl_shed_mw(0.5, g), 0.0);
  EXPECT_NEAR(tcl_shed_mw(0.9, g), (0.9 - 2.0 / 3.0) * 150.0, 1e-12);
  EXPECT_DOUBLE_EQ(tcl_shed_mw(0.5, TclGroupSpec::full_off()), 75.0);
}

TEST(Tcl, CyclingBelowCapHasNoPayback) {
  const std::vector<int> hours = {15, 16};
  const auto d = dr_profile(OptionColumn{1, 1}, hours, flat(29.0), TclGroupSpec::cycling());
  for (double v : d) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Tcl, FullOffShedThenPaybackByHeadroom) {
  // duty 0.5 everywhere: shed 75 MW per hour, headroom 75 MW per hour.
  const std::vector<int> hours = {15, 16};
  const auto d = dr_profile(OptionColumn{1, 1}, hours, flat(29.0), TclGroupSpec::full_off());
  EXPECT_DOUBLE_EQ(d[15], 75.0);
  EXPECT_DOUBLE_EQ(d[16], 75.0);
  EXPECT_DOUBLE_EQ(d[17], -75.0);
  EXPECT_DOUBLE_EQ(d[18], -75.0);
  EXPECT_DOUBLE_EQ(d[19], 0.0);
}

TEST(Tcl, PaybackLandsInLastHourWhenHeadroomRunsOut) {
  auto t = flat(40.0);  // no headroom anywhere after deployment
  t[21] = 29.0;
  const std::vector<int> hours = {21};
  const auto d = dr_profile(OptionColumn{1}, hours, t, TclGroupSpec::full_off());
  EXPECT_DOUBLE_EQ(d[21], 75.0);
  EXPECT_DOUBLE_EQ(d[22], 0.0);
  EXPECT_DOUBLE_EQ(d[23], -75.0);
}

TEST(Tcl, PaybackSkipsDeployedHours) {
  const std::vector<int> hours = {15, 17};
  const auto d = dr_profile(OptionColumn{1, 1}, hours, flat(29.0), TclGroupSpec::full_off());
  EXPECT_DOUBLE_EQ(d[16], -75.0);
  EXPECT_DOUBLE_EQ(d[17], 75.0);
  EXPECT_DOUBLE_EQ(d[18], -75.0);
}

TEST(Tcl, OptionCounts) {
  const std::vector<int> hours = {15, 16, 17};
  HourlyProfile temp(flat(35.0));
  EXPECT_EQ(build_tcl_options(hours, temp, TclGroupSpec::cycling()).option_count(), 8u);
  EXPECT_EQ(build_tcl_options(hours, temp, TclGroupSpec::full_off()).option_count(), 7u);
  const std::vector<int> late = {22, 23};
  EXPECT_EQ(build_tcl_options(late, temp, TclGroupSpec::cycling()).option_count(), 2u);
}

TEST(Tcl, RejectsInfeasibleColumn) {
  const std::vector<int> hours = {15, 16, 17};
  EXPECT_THROW(dr_profile(OptionColumn{1, 1, 1}, hours, flat(35.0), TclGroupSpec::full_off()),
               std::invalid_argument);
}

TEST(Tcl, KappaOutsideRangeRejected) {
  auto g = TclGroupSpec::cycling();
  g.payback_recovery_fraction = 1.2;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Tcl, MatchesReferenceAndConservesEnergy) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> temp_d(10.0, 42.0), kappa_d(0.9, 1.1);
  std::uniform_int_distribution<int> n_d(1, 6), start_d(0, 23);
  for (int trial = 0; trial < 300; ++trial) {
    std::array<double, 24> t{};
    for (auto& v : t) v = temp_d(rng);
    HourlyProfile temp(std::vector<double>(t.begin(), t.end()));
    std::vector<int> hours;
    const int n = n_d(rng);
    const int s = std::min(start_d(rng), 24 - n);
    for (int i = 0; i < n; ++i) hours.push_back(s + i);
    auto g = trial % 2 ? TclGroupSpec::cycling() : TclGroupSpec::full_off();
    g.payback_recovery_fraction = kappa_d(rng);
    const auto set = build_tcl_options(hours, temp, g);
    for (std::size_t o = 0; o < set.option_count(); ++o) {
      const auto on = embed(set.deployment.columns[o], hours);
      const auto ref = oracle::tcl_delta(on, t, g);
      double shed = 0, payback = 0;
      for (int h = 0; h < 24; ++h) {
        EXPECT_NEAR(set.reduction[o][h], ref[h], 1e-9);
        (on[h] ? shed : payback) += set.reduction[o][h];
      }
      EXPECT_NEAR(-payback, shed * g.payback_recovery_fraction, 1e-9 * std::max(1.0, shed));
    }
  }
}
