#include <gtest/gtest.h>

#include <random>

#include "dcm/resources.hpp"

using namespace dcm;

TEST(Bess, StepAccountsForEfficiency) {
  BessSpec b;
  b.discharge_efficiency = 0.8;
  const auto s = bess_step(BessState::full(b), 8.0, b);
  EXPECT_DOUBLE_EQ(s.energy, 10.0);
}

TEST(Bess, RejectsOverPowerAndOverDrain) {
  BessSpec b;
  EXPECT_THROW(bess_step(BessState::full(b), 10.5, b), std::invalid_argument);
  EXPECT_THROW(bess_step(BessState::full(b), -1.0, b), std::invalid_argument);
  EXPECT_THROW(bess_step(BessState{1.0}, 5.0, b), InfeasibleError);
}

TEST(Bess, MaxFeasibleLimitedByEnergy) {
  BessSpec b;
  EXPECT_DOUBLE_EQ(bess_max_feasible(BessState::full(b), b), 10.0);
  EXPECT_NEAR(bess_max_feasible(BessState{2.0}, b), 1.9, 1e-12);
  const auto next = bess_step(BessState{2.0}, bess_max_feasible(BessState{2.0}, b), b);
  EXPECT_NEAR(next.energy, 0.0, 1e-12);
}

TEST(Bess, RandomFeasibleSchedulesStayInBounds) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    BessSpec b;
    b.power_max = 1.0 + 99.0 * u(rng);
    b.energy_max = b.power_max * (0.5 + 3.5 * u(rng));
    b.energy_min = b.energy_max * 0.3 * u(rng);
    b.discharge_efficiency = 0.7 + 0.3 * u(rng);
    BessState s = BessState::full(b);
    double prev = s.energy;
    for (int h = 0; h < 24; ++h) {
      const double p = bess_max_feasible(s, b) * u(rng) * (u(rng) < 0.2 ? 0.0 : 1.0);
      s = bess_step(s, p, b);
      if (s.energy < b.energy_min || s.energy > b.energy_max || s.energy > prev) ++violations;
      prev = s.energy;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(Dg, CostOfFortyMegawattsForTwoHours) {
  const std::vector<double> sched = {40.0, 40.0};
  EXPECT_DOUBLE_EQ(dg_cost(sched, DgSpec{}), 17200.0);
  EXPECT_DOUBLE_EQ(DgSpec{}.net_cost_per_mwh(), 215.0);
}

TEST(Dg, RejectsOutputAboveRating) {
  const std::vector<double> sched = {41.0};
  EXPECT_THROW(dg_cost(sched, DgSpec{}), std::invalid_argument);
}
