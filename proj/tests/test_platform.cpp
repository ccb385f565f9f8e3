#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "svcmarket/platform.hpp"
#include "test_util.hpp"

using namespace svcmarket;

namespace {

Institution idle_inst(int id, char letter, int robots = 8, int business = 4) {
  Institution inst;
  inst.id = id;
  inst.letter = letter;
  inst.graph = Graph(robots + business, TopologyKind::Isolated, {});
  for (int i = 0; i < robots + business; ++i) {
    Agent a;
    a.local = i;
    a.kind = i < robots ? AgentKind::Robot : AgentKind::BusinessAgent;
    a.baseline_rate = a.effective_rate = a.is_robot() ? 2.0 : 1.0;
    inst.agents.push_back(a);
  }
  return inst;
}

}  // namespace

TEST(Estimate, UsysScoringRule) {
  OrderEstimate e{3.0, 4.0, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(order_score(MeasurementMethod::Usys, e), 5.0);
}

TEST(Estimate, IdenticalInstitutionsAgree) {
  const auto a = idle_inst(0, 'A');
  auto b = idle_inst(1, 'A');
  Coefficients k;
  for (auto m : kAllMethods) {
    EXPECT_DOUBLE_EQ(estimate_order_utility('A', 2, a, m, k, 5.0), estimate_order_utility('A', 2, b, m, k, 5.0));
  }
}

TEST(Estimate, SaturatedInstitutionIsInfeasible) {
  auto a = idle_inst(0, 'A');
  for (auto& ag : a.agents) ag.committed_workload = 1e9;
  Coefficients k;
  EXPECT_EQ(estimate_order_utility('A', 1, a, MeasurementMethod::Usys, k, 5.0),
            -std::numeric_limits<double>::infinity());
}

TEST(Estimate, HardOrderWithoutBusinessCapacityIsInfeasible) {
  auto a = idle_inst(0, 'A');
  for (auto& ag : a.agents) {
    if (!ag.is_robot()) ag.committed_workload = 1e9;
  }
  Coefficients k;
  EXPECT_FALSE(predict_order('A', 3, a, k, 5.0).has_value());
  EXPECT_TRUE(predict_order('A', 1, a, k, 5.0).has_value());
}

TEST(Estimate, WrongLetterThrows) {
  const auto a = idle_inst(0, 'A');
  Coefficients k;
  EXPECT_THROW(predict_order('B', 1, a, k, 5.0), TypeMismatch);
}

TEST(Estimate, PredictionArithmetic) {
  auto a = idle_inst(0, 'A', 2, 1);
  a.agents[0].committed_workload = 10.0;  // occupancy 0.5 at rate 2, horizon 10
  Coefficients k;
  const auto e = predict_order('A', 2, a, k, 4.0);
  ASSERT_TRUE(e);
  const double spare = 2.0 * 0.5 + 2.0 + 1.0;
  EXPECT_DOUBLE_EQ(e->predicted_time, workload(2, 1, 2) / spare);
  EXPECT_DOUBLE_EQ(e->predicted_cost, 2.0 * 0.3 * 1.0 / spare);
}

TEST(Select, PenaltyDominance) {
  const std::vector<Candidate> c{{0, 'A', 5.0, 0.2, 0.0}, {1, 'B', 5.0, 0.8, 0.0}};
  EXPECT_EQ(select_institution(c, 1.0, 0.0), 0u);
}

TEST(Select, PureArgmax) {
  const std::vector<Candidate> c{{0, 'A', 5.0, 0.0, 0.0}, {1, 'B', 4.0, 0.0, 0.0}};
  EXPECT_EQ(select_institution(c, 1.0, 1.0), 0u);
}

TEST(Select, PenaltyFlipsChoice) {
  const std::vector<Candidate> c{{0, 'A', 5.0, 0.9, 0.0}, {1, 'B', 4.5, 0.1, 0.0}};
  EXPECT_EQ(select_institution(c, 1.0, 0.0), 1u);
}

TEST(Select, TiesGoToLowestLetter) {
  const std::vector<Candidate> c{{3, 'D', 2.0, 0.0, 0.0}, {1, 'B', 2.0, 0.0, 0.0}};
  EXPECT_EQ(select_institution(c, 1.0, 1.0), 1u);
}

TEST(Select, InfeasibleNeverWins) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<Candidate> none{{0, 'A', ninf, 0.0, 0.0}};
  EXPECT_FALSE(select_institution(none, 1.0, 1.0).has_value());
  const std::vector<Candidate> one{{0, 'A', ninf, 0.0, 0.0}, {1, 'B', -50.0, 1.0, 1.0}};
  EXPECT_EQ(select_institution(one, 1.0, 1.0), 1u);
}

TEST(Select, ShiftInvarianceAndMaxWithoutPenalty) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10.0, 10.0), occ(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Candidate> c;
    for (int i = 0; i < 5; ++i) c.push_back({i, static_cast<char>('A' + i), u(rng), occ(rng), occ(rng)});
    const auto pick = select_institution(c, 1.0, 1.0);
    auto shifted = c;
    const double d = u(rng);
    for (auto& x : shifted) x.estimated_utility += d;
    EXPECT_EQ(select_institution(shifted, 1.0, 1.0), pick);
    const auto plain = select_institution(c, 0.0, 0.0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i].estimated_utility > c[best].estimated_utility) best = i;
    }
    EXPECT_EQ(plain, best);
  }
}

TEST(Assign, OnlyMatchingLetter) {
  std::vector<Institution> insts{idle_inst(0, 'A'), idle_inst(1, 'B'), idle_inst(2, 'C')};
  const std::vector<double> te{5.0, 5.0, 5.0};
  Coefficients k;
  const auto d = assign_order(7, 0, 'B', 2, insts, MeasurementMethod::Usys, k, te);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->institution, 1);
  EXPECT_EQ(d->candidates, 1);
  EXPECT_NEAR(d->score, d->estimated_utility - d->robot_occupancy - d->business_occupancy, 1e-12);
  EXPECT_FALSE(assign_order(7, 0, 'H', 2, insts, MeasurementMethod::Usys, k, te).has_value());
}

TEST(Objective, Examples) {
  EXPECT_DOUBLE_EQ(platform_objective(100, 10, 4, 0.5, 0.5), 93.0);
  EXPECT_DOUBLE_EQ(platform_objective(100, 10, 4, 0.0, 0.0), 100.0);
  const std::vector<double> balanced{0.3, 0.3, 0.3};
  EXPECT_DOUBLE_EQ(load_imbalance(balanced), 0.0);
  EXPECT_DOUBLE_EQ(platform_objective(100, 10, load_imbalance(balanced), 0.5, 0.5), 95.0);
}

TEST(Objective, RandomInputsMatchOracle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 100.0), c(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double r = u(rng), t = u(rng), o = u(rng), e1 = c(rng), e2 = c(rng);
    EXPECT_TRUE(testing_util::rel_near(platform_objective(r, t, o, e1, e2), r - e1 * t - e2 * o, 1e-12));
  }
}
