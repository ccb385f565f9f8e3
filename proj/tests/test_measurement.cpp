#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "svcmarket/measurement.hpp"
#include "test_util.hpp"

using namespace svcmarket;

TEST(RobotUtility, Examples) {
  EXPECT_DOUBLE_EQ(robot_utility(1.0 * 2.0, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(robot_utility(0.0, 0.5), -0.5);
  EXPECT_DOUBLE_EQ(robot_utility(0.5 * 3.0, 0.5), 1.0);
}

TEST(RobotUtility, KindMismatch) {
  Agent p;
  p.kind = AgentKind::BusinessAgent;
  EXPECT_THROW(robot_utility(p), KindMismatch);
  Agent r;
  EXPECT_THROW(business_utility(r, 0.3), KindMismatch);
}

TEST(BusinessUtility, Examples) {
  EXPECT_DOUBLE_EQ(business_utility(2.0, 0.0, 0.3), 2.0);
  EXPECT_NEAR(business_utility(2.0, 3.0, 0.3), 2.9, 1e-12);
  EXPECT_DOUBLE_EQ(business_utility(2.0, 3.0, 0.0), 2.0);
}

TEST(OrgUtility, NoOrders) {
  const std::vector<double> robots(8, 0.5);
  const std::vector<double> business(4, 2.0);
  const auto u = org_utility(0.0, robots, business, 1.0);
  EXPECT_DOUBLE_EQ(u.created_value, 0.0);
  EXPECT_DOUBLE_EQ(u.cost, 12.0);
  EXPECT_DOUBLE_EQ(u.utility, -12.0);
}

TEST(OrgUtility, ValueAndConversion) {
  const std::vector<double> robots(8, 0.5);
  const std::vector<double> business(4, 2.0);
  EXPECT_DOUBLE_EQ(org_utility(20.0, robots, business, 1.0).utility, 8.0);
  EXPECT_DOUBLE_EQ(org_utility(20.0, robots, business, 0.0).utility, -12.0);
}

TEST(OrgUtility, LinearInConversion) {
  const std::vector<double> robots{0.5, 0.5};
  const std::vector<double> business{2.4};
  const double a = org_utility(7.0, robots, business, 1.0).utility;
  const double b = org_utility(7.0, robots, business, 2.0).utility;
  EXPECT_NEAR(b - a, 7.0, 1e-12);
}

TEST(OrgUtility, FromInstitution) {
  Institution inst;
  inst.processed_value = 10.0;
  Agent r;
  r.maintenance_cost_per_cycle = 0.5;
  Agent p;
  p.kind = AgentKind::BusinessAgent;
  p.base_income = 2.0;
  p.created_value = 4.0;
  inst.agents = {r, r, p};
  const auto u = org_utility(inst, 0.3, 1.0);
  EXPECT_NEAR(u.cost, 0.5 + 0.5 + 2.0 + 4.0 * 0.3, 1e-12);
  EXPECT_NEAR(u.utility, 10.0 - u.cost, 1e-12);
}

TEST(SystemUtility, Examples) {
  const std::vector<Outcome> one{{2.0, 4.0, 2.0}};
  const std::vector<double> cost{1.0};
  EXPECT_DOUBLE_EQ(system_utility(one, cost), 3.0);
  const std::vector<Outcome> on_time{{2.0, 3.0, 3.0}, {1.0, 5.0, 5.0}};
  const std::vector<double> costs{1.0, 0.5};
  EXPECT_DOUBLE_EQ(system_utility(on_time, costs), 3.0 - 1.5);
  EXPECT_DOUBLE_EQ(system_utility(std::span<const Outcome>{}, costs), -1.5);
}

TEST(SystemUtility, MissingReference) {
  const std::vector<Outcome> bad{{2.0, std::nullopt, 2.0}};
  EXPECT_THROW(system_utility(bad, std::span<const double>{}), MissingReferenceTime);
}

TEST(SystemUtility, AdditiveInCost) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::vector<Outcome> out;
  for (int i = 0; i < 10; ++i) out.push_back({std::round(u(rng)), u(rng), u(rng)});
  std::vector<double> costs{u(rng), u(rng), u(rng)};
  const double before = system_utility(out, costs);
  costs[1] += 2.5;
  EXPECT_NEAR(system_utility(out, costs), before - 2.5, 1e-9);
}

TEST(SystemUtility, RandomInputsMatchOracle) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Outcome> out;
    double expect = 0.0;
    for (int i = 0; i < 6; ++i) {
      const Outcome o{1.0 + i % 3, u(rng), u(rng)};
      expect += o.value * *o.reference_time / o.realized_time;
      out.push_back(o);
    }
    const std::vector<double> costs{u(rng), u(rng)};
    expect -= costs[0] + costs[1];
    EXPECT_TRUE(testing_util::rel_near(system_utility(out, costs), expect, 1e-12));
  }
}

TEST(Baselines, SaLZeroAtReferenceSpeed) {
  OutcomeLog log;
  log.completed = {{2.0, 4.0, 4.0}, {1.0, 3.0, 3.0}};
  log.arrived = 2;
  EXPECT_DOUBLE_EQ(baseline_score(MeasurementMethod::SaL, log), 0.0);
}

TEST(Baselines, PerfectDM) { EXPECT_DOUBLE_EQ(dm_aggregate(1.0, 1.0, 1.0), 1.0); }

TEST(Baselines, QoSEqualWeights) { EXPECT_NEAR(qos_aggregate(0.9, 0.8, 0.7), 0.8, 1e-12); }

TEST(Baselines, EmptyLog) {
  OutcomeLog log;
  EXPECT_THROW(baseline_score(MeasurementMethod::DM, log), EmptyLog);
  log.total_cost = 3.0;
  EXPECT_DOUBLE_EQ(baseline_score(MeasurementMethod::Usys, log), -3.0);
}

TEST(Baselines, PerOrderScores) {
  const OrderEstimate e{2.0, 4.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(order_score(MeasurementMethod::Usys, e), 3.5);
  EXPECT_DOUBLE_EQ(order_score(MeasurementMethod::SaL, e), 0.5);
  EXPECT_NEAR(order_score(MeasurementMethod::DM, e), (1.0 + 1.0 + 4.0 / 4.5) / 3.0, 1e-12);
  EXPECT_NEAR(order_score(MeasurementMethod::QoS, e), (4.0 / 6.0 + 1.0 + 2.0 / 2.5) / 3.0, 1e-12);
  const OrderEstimate late{2.0, 2.0, 8.0, 0.0};
  EXPECT_DOUBLE_EQ(order_score(MeasurementMethod::SaL, late), -1.0);
}

TEST(Factors, RawFromLog) {
  OutcomeLog log;
  log.completed = {{1.0, 4.0, 2.0}, {2.0, 4.0, 8.0}};
  log.arrived = 4;
  const std::vector<double> inst{3.0, 1.0};
  const std::vector<double> ind{-1.0, 1.0};
  const auto r = raw_factors(log, inst, ind, 1e-9);
  EXPECT_DOUBLE_EQ(r.mean_latency, 5.0);
  EXPECT_DOUBLE_EQ(r.latency_std, 3.0);
  EXPECT_DOUBLE_EQ(r.success_rate, 0.25);
  EXPECT_DOUBLE_EQ(r.mean_speedup, (2.0 + 0.5) / 2.0);
  EXPECT_NEAR(r.load_gini, testing_util::brute_gini({3.0, 1.0}), 1e-12);
  EXPECT_NEAR(r.fairness_gini, testing_util::brute_gini({1e-9, 2.0 + 1e-9}), 1e-12);
}

TEST(Factors, IdenticalCellsScoreEqually) {
  RawFactors r{5.0, 1.0, 0.8, 1.2, 0.1, 0.2};
  const std::vector<RawFactors> cells{r, r, r};
  for (const auto& s : factor_scores(cells)) {
    for (double f : s.factors()) EXPECT_DOUBLE_EQ(f, 1.0);
    EXPECT_DOUBLE_EQ(s.Overall, 1.0);
  }
}

TEST(Factors, EqualInstitutionsGiveFullLoadScore) {
  RawFactors a{5.0, 1.0, 0.8, 1.2, 0.0, 0.2};
  RawFactors b{6.0, 2.0, 0.7, 1.1, 0.3, 0.1};
  const std::vector<RawFactors> cells{a, b};
  EXPECT_DOUBLE_EQ(factor_scores(cells)[0].LG, 1.0);
}

TEST(Factors, OverallIsExactMean) {
  EXPECT_NEAR(overall_of(0.99, 1.00, 0.94, 1.00, 0.86, 0.98), 0.961666666666667, 1e-12);
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<RawFactors> cells;
  for (int i = 0; i < 12; ++i) cells.push_back({u(rng), u(rng), u(rng) / 10, u(rng), u(rng) / 10, u(rng) / 10});
  for (const auto& s : factor_scores(cells)) {
    double sum = 0.0;
    for (double f : s.factors()) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      sum += f;
    }
    EXPECT_EQ(s.Overall, sum / 6.0);
  }
}

TEST(Factors, CostTypeReversed) {
  RawFactors fast{1.0, 0.0, 1.0, 2.0, 0.0, 0.0};
  RawFactors slow{3.0, 2.0, 0.0, 1.0, 0.5, 0.5};
  const std::vector<RawFactors> cells{fast, slow};
  const auto s = factor_scores(cells);
  EXPECT_DOUBLE_EQ(s[0].IL, 1.0);
  EXPECT_DOUBLE_EQ(s[1].IL, 0.0);
  EXPECT_DOUBLE_EQ(s[0].Sp, 1.0);
  EXPECT_DOUBLE_EQ(s[0].Overall, 1.0);
  EXPECT_DOUBLE_EQ(s[1].Overall, 0.0);
}

TEST(Stability, Examples) {
  const std::vector<double> same{0.7, 0.7, 0.7};
  EXPECT_DOUBLE_EQ(stability_score(same), 1.0);
  const std::vector<double> extreme{0.0, 1.0};
  EXPECT_DOUBLE_EQ(stability_score(extreme), 0.0);
  const std::vector<double> spread{0.8, 0.9, 1.0};
  EXPECT_NEAR(stability_score(spread), 1.0 - std::sqrt(0.02 / 3.0) / 0.5, 1e-12);
  EXPECT_NEAR(stability_score(spread), 0.837, 1e-3);
  const std::vector<double> single{0.5};
  EXPECT_THROW(stability_score(single), Error);
}
