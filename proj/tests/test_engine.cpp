#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "svcmarket/engine.hpp"
#include "svcmarket/io.hpp"

using namespace svcmarket;

namespace {

const ValidatedScenario& default_scenario() {
  static const ValidatedScenario s = validate_scenario(ScenarioConfig{});
  return s;
}

std::string events_text(const RunResult& r) {
  std::ostringstream os;
  write_events_csv(os, r.events);
  return os.str();
}

std::vector<std::string> arrival_lines(const RunResult& r) {
  std::vector<std::string> out;
  for (const auto& e : r.events.records()) {
    if (e.kind != EventKind::Arrival) continue;
    std::ostringstream os;
    write_event_row(os, e);
    // Drop the log-wide sequence number; it counts every event kind.
    const auto row = os.str();
    out.push_back(row.substr(row.find(',') + 1));
  }
  return out;
}

}  // namespace

TEST(Engine, DeterministicEventLog) {
  const auto a = run_simulation(default_scenario(), 42);
  const auto b = run_simulation(default_scenario(), 42);
  EXPECT_EQ(events_text(a), events_text(b));
  const auto c = run_simulation(default_scenario(), 43);
  EXPECT_NE(events_text(a), events_text(c));
}

TEST(Engine, ArrivalStreamIndependentOfTopologyAndMethod) {
  const auto ref = arrival_lines(run_simulation(default_scenario(), 7));
  ASSERT_FALSE(ref.empty());
  for (auto k : kAllTopologies) {
    EXPECT_EQ(arrival_lines(run_simulation(default_scenario().with_topology(k), 7)), ref) << preset_name(k);
  }
  for (auto m : kAllMethods) {
    EXPECT_EQ(arrival_lines(run_simulation(default_scenario().with_method(m), 7)), ref) << to_string(m);
  }
}

TEST(Engine, EmptyDemandPaysOnlyCost) {
  ScenarioConfig c;
  c.arrival_profile.kind = ProfileKind::Piecewise;
  c.arrival_profile.segments = {{0, 120, 0.0}};
  const auto r = run_simulation(validate_scenario(c), 1);
  EXPECT_EQ(r.arrived_orders, 0u);
  double cost = 0.0;
  for (const auto& i : r.institutions) cost += i.cost;
  EXPECT_DOUBLE_EQ(cost, 8 * (8 * 0.5 + 4 * 2.0));
  EXPECT_NEAR(r.system_utility, -cost, 1e-9);
  EXPECT_FALSE(r.factors.has_value());
}

TEST(Engine, CoupledBeatsIsolated) {
  const auto gc = run_simulation(default_scenario().with_topology(TopologyKind::GloballyCoupled), 3);
  const auto iso = run_simulation(default_scenario().with_topology(TopologyKind::Isolated), 3);
  EXPECT_GT(gc.system_utility, iso.system_utility);
}

TEST(Engine, ConservationAndLogAudit) {
  for (auto kind : kAllTopologies) {
    const auto r = run_simulation(default_scenario().with_topology(kind), 11);
    const auto& k = r.scenario.coefficients;

    double processed = 0.0;
    for (const auto& i : r.institutions) processed += i.processed_value;
    double completed_value = 0.0;
    for (const auto& o : r.outcomes.completed) completed_value += o.value;
    EXPECT_NEAR(processed, completed_value, 1e-9);

    double agent_value = 0.0;
    for (const auto& a : r.agents) agent_value += a.created_value;
    EXPECT_NEAR(agent_value, processed, 1e-9);

    std::set<std::uint64_t> arrived;
    std::map<std::pair<std::uint64_t, int>, int> assignments;
    std::map<std::pair<std::uint64_t, int>, int> assigned_to;
    std::map<std::uint64_t, int> complexity;
    for (const auto& e : r.events.records()) {
      std::visit(
          [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ArrivalPayload>) {
              arrived.insert(p.order);
              complexity[p.order] = p.complexity;
            } else if constexpr (std::is_same_v<P, AssignmentPayload>) {
              EXPECT_TRUE(arrived.contains(p.order));
              ++assignments[{p.order, p.sub}];
              assigned_to[{p.order, p.sub}] = p.institution;
              EXPECT_EQ(static_cast<char>('A' + p.institution), p.letter);
            } else if constexpr (std::is_same_v<P, TeamFormedPayload>) {
              EXPECT_TRUE(arrived.contains(p.order));
              EXPECT_EQ(assigned_to.at({p.order, p.sub}), p.institution);
              if (complexity.at(p.order) > k.robot_threshold) {
                EXPECT_GE(p.business_members, 1);
              }
              double share = 0.0;
              for (double s : p.terms.shares) share += s;
              EXPECT_NEAR(share, 1.0, 1e-9);
            } else if constexpr (std::is_same_v<P, CompletionPayload>) {
              EXPECT_TRUE(arrived.contains(p.order));
              const auto& t = p.terms;
              const double recomputed = completion_time(t.workload, t.sum_rate, t.mean_occupancy, t.team_size,
                                                        k.congestion, k.team_size_delay);
              EXPECT_NEAR(t.realized_time, recomputed, 1e-12);
              double sum_rate = 0.0;
              for (double x : t.rates) sum_rate += x;
              EXPECT_NEAR(sum_rate, t.sum_rate, 1e-12);
            }
          },
          e.payload);
    }
    for (const auto& [key, n] : assignments) EXPECT_EQ(n, 1);
  }
}

TEST(Engine, TickFlowsSumToSystemUtility) {
  const auto r = run_simulation(default_scenario(), 5);
  ASSERT_EQ(r.series.size(), 120u);
  double sum = 0.0;
  for (const auto& p : r.series) sum += p.system_flow;
  EXPECT_NEAR(sum, r.system_utility, 1e-6 * std::max(1.0, std::abs(r.system_utility)));
  EXPECT_NEAR(r.series.back().system_cumulative, r.system_utility, 1e-6 * std::max(1.0, std::abs(r.system_utility)));
  double org = 0.0;
  for (const auto& i : r.institutions) org += i.utility;
  EXPECT_NEAR(r.series.back().org_cumulative, org, 1e-6 * std::max(1.0, std::abs(org)));
}

TEST(Engine, SubOrdersEndCompletedOrExpired) {
  const auto r = run_simulation(default_scenario(), 9);
  EXPECT_EQ(r.outcomes.completed.size() + r.expired_subs, r.outcomes.arrived);
}

TEST(Engine, ReplicationsAggregate) {
  const auto one = run_replications(default_scenario(), 21, 1, 1);
  const auto direct = run_simulation(default_scenario(), replication_seed(21, 0));
  EXPECT_DOUBLE_EQ(one.system_utility.mean, direct.system_utility);
  EXPECT_EQ(events_text(one.runs[0]), events_text(direct));

  const auto ten = run_replications(default_scenario(), 21, 10);
  const auto again = run_replications(default_scenario(), 21, 10, 1);
  EXPECT_GT(ten.system_utility.std, 0.0);
  EXPECT_DOUBLE_EQ(ten.system_utility.mean, again.system_utility.mean);
  ASSERT_EQ(ten.cooperation.size(), 8u);
  EXPECT_EQ(ten.cooperation[0].runs().size(), 10u);
}

TEST(Engine, DoublingRateRaisesArrivals) {
  ScenarioConfig low;
  low.arrival_rate = 2.0;
  ScenarioConfig high;
  high.arrival_rate = 4.0;
  const auto a = run_replications(validate_scenario(low), 3, 50);
  const auto b = run_replications(validate_scenario(high), 3, 50);
  double na = 0.0, nb = 0.0;
  for (const auto& r : a.runs) na += static_cast<double>(r.arrived_orders);
  for (const auto& r : b.runs) nb += static_cast<double>(r.arrived_orders);
  EXPECT_GT(nb, na);
}

TEST(Engine, BusinessAgentsSpreadEvenly) {
  const auto pos = detail::business_positions(Composition{});
  EXPECT_EQ(pos, (std::vector<int>{0, 3, 6, 9}));
}

TEST(Engine, RunningMeanReferenceRule) {
  ScenarioConfig c;
  c.reference_rule = ReferenceRule::RunningMean;
  const auto r = run_simulation(validate_scenario(c), 2);
  ASSERT_FALSE(r.outcomes.completed.empty());
  for (const auto& o : r.outcomes.completed) EXPECT_GT(*o.reference_time, 0.0);
}
