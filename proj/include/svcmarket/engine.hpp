#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "svcmarket/core.hpp"
#include "svcmarket/demand.hpp"
#include "svcmarket/execution.hpp"
#include "svcmarket/measurement.hpp"
#include "svcmarket/network.hpp"
#include "svcmarket/platform.hpp"
#include "svcmarket/rng.hpp"
#include "svcmarket/stats.hpp"

namespace svcmarket {

struct AgentSummary {
  int id = 0;
  int institution = 0;
  int local = 0;
  AgentKind kind = AgentKind::Robot;
  int degree = 0;
  double baseline_rate = 0.0;
  double effective_rate = 0.0;
  double literal_capability = 0.0;  // s^0 * phi with unit intensities
  double created_value = 0.0;
  double utility = 0.0;
  double next_rate = 0.0;  // utility-modulated rate for a following cycle
  int teams = 0;
};

struct InstitutionSummary {
  int id = 0;
  char letter = 'A';
  double processed_value = 0.0;
  double cost = 0.0;
  double utility = 0.0;
  std::size_t completed = 0;
  StructuralStats structure;
  std::size_t edges = 0;
};

/// Per-tick flows. Summing `system_flow` over the run gives U_sys, summing
/// `org_flow` gives the sum of U_G.
struct TickPoint {
  std::int64_t tick = 0;
  int arrivals = 0;
  int completions = 0;
  std::size_t pending = 0;  // sub-orders waiting for an institution or a team
  double mean_occupancy = 0.0;
  double occupancy_variance = 0.0;  // across institutions
  double system_flow = 0.0;
  double org_flow = 0.0;
  double system_cumulative = 0.0;
  double org_cumulative = 0.0;
};

struct RunResult {
  ScenarioConfig scenario;  // resolved config; `seed` is the seed this run used
  EventLog events;
  std::vector<AgentSummary> agents;
  std::vector<InstitutionSummary> institutions;
  std::vector<Graph> graphs;
  std::vector<Matrix> cooperation;  // N_ij per institution
  std::vector<TickPoint> series;
  OutcomeLog outcomes;
  std::optional<RawFactors> factors;  // unset when nothing completed
  std::size_t arrived_orders = 0;
  std::size_t completed_orders = 0;
  std::size_t expired_subs = 0;
  double system_utility = 0.0;
  double platform_objective = 0.0;

  [[nodiscard]] std::vector<double> business_utilities() const {
    std::vector<double> u;
    for (const auto& a : agents) {
      if (a.kind == AgentKind::BusinessAgent) u.push_back(a.utility);
    }
    return u;
  }
};

namespace detail {

struct RunningTeam {
  std::size_t order = 0;  // index into the order table
  int sub = 0;
  int institution = 0;
  TeamPlan plan;
  double reference_time = 0.0;
  std::int64_t completion_tick = 0;
};

/// Node indices of the business agents: spread evenly over 0..n-1 starting
/// at 0, so each one sits among its own robots and the star hub is one.
inline std::vector<int> business_positions(const Composition& comp) {
  std::vector<int> pos;
  const int n = comp.total();
  for (int j = 0; j < comp.business_agents; ++j) {
    pos.push_back(static_cast<int>(static_cast<long long>(j) * n / comp.business_agents));
  }
  return pos;
}

inline std::vector<Institution> build_institutions(const ScenarioConfig& c, std::uint64_t seed) {
  const auto& comp = c.agents_per_institution;
  const auto& k = c.coefficients;
  std::vector<Institution> insts;
  int next_id = 0;
  for (int i = 0; i < c.n_institutions; ++i) {
    Institution inst;
    inst.id = i;
    inst.letter = static_cast<char>('A' + i);
    Rng rng(mix_seed(seed, kTopologyStreamBase + static_cast<std::uint64_t>(i)));
    inst.graph = generate_topology(c.topology, comp.total(), c.topology_params, rng);
    const auto phi_hat = normalize_amplification(structural_amplification(inst.graph));
    const auto business = business_positions(comp);
    for (int local = 0; local < comp.total(); ++local) {
      Agent a;
      a.id = next_id++;
      a.local = local;
      a.institution = i;
      if (std::binary_search(business.begin(), business.end(), local)) {
        a.kind = AgentKind::BusinessAgent;
        a.baseline_rate = comp.business_rate;
        a.capability_threshold = 3;
        a.base_income = comp.business_income;
      } else {
        a.kind = AgentKind::Robot;
        a.baseline_rate = comp.robot_rate;
        a.capability_threshold = k.robot_threshold;
        a.maintenance_cost_per_cycle = comp.robot_maintenance;
      }
      a.effective_rate =
          effective_capability(a.baseline_rate, phi_hat[static_cast<std::size_t>(local)], k.network_gain);
      inst.agents.push_back(a);
    }
    insts.push_back(std::move(inst));
  }
  return insts;
}

inline ExecutionTerms terms_of(const Institution& inst, const TeamPlan& p, double reference_time) {
  ExecutionTerms t;
  for (int m : p.members) t.members.push_back(inst.agents[static_cast<std::size_t>(m)].id);
  t.shares = p.shares;
  t.rates = p.rates;
  t.workload = p.work;
  t.sum_rate = p.sum_rate;
  t.mean_occupancy = p.mean_occupancy;
  t.team_size = static_cast<int>(p.members.size());
  t.realized_time = p.predicted_time;
  t.reference_time = reference_time;
  return t;
}

}  // namespace detail

/// One seeded run over [0, cycle_duration). Phases per tick: arrivals,
/// assignment of waiting sub-orders (FIFO), team formation for assigned
/// sub-orders (FIFO), completions due this tick, workload drain. At tick
/// cycle_duration unfinished sub-orders expire and utilities settle.
inline RunResult run_simulation(const ValidatedScenario& s, std::uint64_t seed) {
  const ScenarioConfig& c = s.config();
  const Coefficients& k = c.coefficients;
  RunResult res;
  res.scenario = c;
  res.scenario.seed = seed;

  auto insts = detail::build_institutions(c, seed);
  for (const auto& inst : insts) {
    res.graphs.push_back(inst.graph);
    res.cooperation.push_back(zero_matrix(inst.graph.size()));
  }
  std::vector<std::size_t> completed_per_inst(insts.size(), 0);

  Rng arrivals(mix_seed(seed, kArrivalStream));
  ReferenceHistory history;
  std::vector<Order> orders;
  std::deque<std::pair<std::size_t, int>> waiting;   // not yet assigned
  std::deque<std::pair<std::size_t, int>> assigned;  // assigned, no team yet
  std::vector<detail::RunningTeam> running;
  std::vector<double> completed_times;

  double fixed_cost = 0.0;
  for (const auto& inst : insts) {
    for (const auto& a : inst.agents) fixed_cost += a.is_robot() ? a.maintenance_cost_per_cycle : a.base_income;
  }
  const double fixed_per_tick = fixed_cost / static_cast<double>(c.cycle_duration);

  const auto reference_time = [&](const Institution& inst, int complexity) {
    const double w = workload(complexity, k.workload_base, k.workload_per_complexity);
    if (c.reference_rule == ReferenceRule::RunningMean) {
      return history.reference_time(complexity, w, inst.mean_baseline_rate());
    }
    return w / inst.mean_baseline_rate();
  };

  double imbalance_sum = 0.0;
  double sys_cum = 0.0, org_cum = 0.0;
  std::uint64_t next_order = 0;

  for (std::int64_t t = 0; t < c.cycle_duration; ++t) {
    TickPoint point;
    point.tick = t;

    // Arrivals.
    const long n = sample_arrival_count(c.arrival_profile, t, 1.0, arrivals);
    for (long i = 0; i < n; ++i) {
      Order o = synthesize_order(c.order_attributes, t, next_order++, arrivals);
      res.events.append(t, EventKind::Arrival,
                        ArrivalPayload{o.id, std::string(o.otype.letters()), o.complexity});
      for (int sub = 0; sub < static_cast<int>(o.subs.size()); ++sub) waiting.emplace_back(orders.size(), sub);
      orders.push_back(std::move(o));
    }
    point.arrivals = static_cast<int>(n);

    // Assignment.
    std::deque<std::pair<std::size_t, int>> still_waiting;
    for (const auto& [oi, sub] : waiting) {
      Order& o = orders[oi];
      SubOrder& so = o.subs[static_cast<std::size_t>(sub)];
      std::vector<double> refs;
      for (const auto& inst : insts) refs.push_back(reference_time(inst, o.complexity));
      const auto d = assign_order(o.id, sub, so.letter, o.complexity, insts, c.measurement_method, k, refs,
                                  c.baseline_weights);
      if (!d) {
        still_waiting.emplace_back(oi, sub);
        continue;
      }
      so.institution = d->institution;
      so.advance(OrderState::Assigned);
      if (o.state == OrderState::Pending) o.advance(OrderState::Assigned);
      res.events.append(t, EventKind::Assignment,
                        AssignmentPayload{o.id, sub, so.letter, d->institution, d->estimated_utility,
                                          d->robot_occupancy, d->business_occupancy, d->score, d->candidates});
      assigned.emplace_back(oi, sub);
    }
    waiting = std::move(still_waiting);

    // Team formation.
    std::deque<std::pair<std::size_t, int>> still_assigned;
    for (const auto& [oi, sub] : assigned) {
      Order& o = orders[oi];
      SubOrder& so = o.subs[static_cast<std::size_t>(sub)];
      Institution& inst = insts[static_cast<std::size_t>(*so.institution)];
      const double value = o.value();
      const double w = workload(value, k.workload_base, k.workload_per_complexity);
      const double te = reference_time(inst, o.complexity);
      auto scorer = [&](const TeamPlan& p) {
        return order_score(c.measurement_method,
                           OrderEstimate{value, te, p.predicted_time, value * k.income_conversion * p.business_share},
                           c.baseline_weights);
      };
      auto plan = form_team(inst, o.complexity, w, k, scorer);
      if (!plan) {
        still_assigned.emplace_back(oi, sub);
        continue;
      }
      for (std::size_t m = 0; m < plan->members.size(); ++m) {
        auto& member = inst.agents[static_cast<std::size_t>(plan->members[m])];
        member.committed_workload += plan->shares[m] * w;
        member.assigned_workload += plan->shares[m] * w;
      }
      const auto done = t + static_cast<std::int64_t>(std::ceil(plan->predicted_time));
      so.advance(OrderState::Executing);
      if (o.state == OrderState::Assigned) o.advance(OrderState::Executing);
      so.start_tick = t;
      so.completion_tick = done;
      res.events.append(t, EventKind::TeamFormed,
                        TeamFormedPayload{o.id, sub, so.letter, inst.id, detail::terms_of(inst, *plan, te), done,
                                          plan->business_members});
      running.push_back(detail::RunningTeam{oi, sub, inst.id, std::move(*plan), te, done});
    }
    assigned = std::move(still_assigned);

    // Completions.
    std::vector<detail::RunningTeam> still_running;
    for (auto& team : running) {
      if (team.completion_tick != t) {
        still_running.push_back(std::move(team));
        continue;
      }
      Order& o = orders[team.order];
      SubOrder& so = o.subs[static_cast<std::size_t>(team.sub)];
      Institution& inst = insts[static_cast<std::size_t>(team.institution)];
      const double value = o.value();
      const double trly = team.plan.predicted_time;
      so.advance(OrderState::Completed);
      so.realized_time = trly;
      so.reference_time = team.reference_time;
      for (std::size_t m = 0; m < team.plan.members.size(); ++m) {
        inst.agents[static_cast<std::size_t>(team.plan.members[m])].created_value += team.plan.shares[m] * value;
        for (std::size_t q = m + 1; q < team.plan.members.size(); ++q) {
          auto& counts = res.cooperation[static_cast<std::size_t>(inst.id)];
          const auto a = static_cast<std::size_t>(team.plan.members[m]);
          const auto b = static_cast<std::size_t>(team.plan.members[q]);
          counts[a][b] += 1.0;
          counts[b][a] += 1.0;
        }
      }
      inst.processed_value += value;
      ++completed_per_inst[static_cast<std::size_t>(inst.id)];
      history.record(o.complexity, trly);
      res.outcomes.completed.push_back(Outcome{value, team.reference_time, trly});
      completed_times.push_back(trly);

      const double business_cost = value * k.income_conversion * team.plan.business_share;
      point.system_flow += value * team.reference_time / trly - business_cost;
      point.org_flow += value * k.org_value_conversion - business_cost;
      ++point.completions;

      const bool parent_done = o.refresh_completion();
      if (parent_done) ++res.completed_orders;
      res.events.append(t, EventKind::Completion,
                        CompletionPayload{o.id, team.sub, so.letter, inst.id, o.complexity,
                                          detail::terms_of(inst, team.plan, team.reference_time), parent_done,
                                          o.realized_time.value_or(0.0)});
    }
    running = std::move(still_running);

    // Committed work drains at each agent's effective rate.
    std::vector<double> inst_occ;
    for (auto& inst : insts) {
      double occ = 0.0;
      for (auto& a : inst.agents) {
        a.committed_workload = std::max(0.0, a.committed_workload - a.effective_rate);
        occ += occupancy(a, k.occupancy_horizon);
      }
      inst_occ.push_back(inst.agents.empty() ? 0.0 : occ / static_cast<double>(inst.agents.size()));
    }
    point.mean_occupancy = stats::mean(inst_occ);
    point.occupancy_variance = load_imbalance(inst_occ);
    imbalance_sum += point.occupancy_variance;

    point.system_flow -= fixed_per_tick;
    point.org_flow -= fixed_per_tick;
    sys_cum += point.system_flow;
    org_cum += point.org_flow;
    point.system_cumulative = sys_cum;
    point.org_cumulative = org_cum;
    point.pending = waiting.size() + assigned.size();
    res.series.push_back(point);
  }

  // Cycle end: everything unfinished expires, then utilities settle.
  const std::int64_t end = c.cycle_duration;
  for (auto& o : orders) {
    for (int sub = 0; sub < static_cast<int>(o.subs.size()); ++sub) {
      auto& so = o.subs[static_cast<std::size_t>(sub)];
      if (so.state == OrderState::Completed) continue;
      const auto before = so.state;
      so.advance(OrderState::Expired);
      ++res.expired_subs;
      res.events.append(end, EventKind::Expiry, ExpiryPayload{o.id, sub, so.letter, std::string(to_string(before))});
    }
    if (o.state != OrderState::Completed) o.advance(OrderState::Expired);
  }

  std::vector<double> org_costs;
  std::vector<double> all_utilities;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    auto& inst = insts[i];
    std::vector<double> local_utils;
    for (auto& a : inst.agents) {
      a.utility = a.is_robot() ? robot_utility(a) : business_utility(a, k.income_conversion);
      local_utils.push_back(a.utility);
      all_utilities.push_back(a.utility);
    }
    const auto ou = org_utility(inst, k.income_conversion, k.org_value_conversion);
    inst.cost = ou.cost;
    org_costs.push_back(ou.cost);
    res.events.append(end, EventKind::Settlement,
                      SettlementPayload{inst.id, ou.created_value, ou.cost, ou.utility});

    InstitutionSummary is;
    is.id = inst.id;
    is.letter = inst.letter;
    is.processed_value = ou.created_value;
    is.cost = ou.cost;
    is.utility = ou.utility;
    is.completed = completed_per_inst[i];
    is.structure = structural_stats(inst.graph);
    is.edges = inst.graph.edge_count();
    res.institutions.push_back(is);

    const auto phi = structural_amplification(inst.graph);
    for (const auto& a : inst.agents) {
      AgentSummary as;
      as.id = a.id;
      as.institution = a.institution;
      as.local = a.local;
      as.kind = a.kind;
      as.degree = inst.graph.degree(a.local);
      as.baseline_rate = a.baseline_rate;
      as.effective_rate = a.effective_rate;
      as.literal_capability = literal_capability(a.baseline_rate, phi[static_cast<std::size_t>(a.local)]);
      as.created_value = a.created_value;
      as.utility = a.utility;
      as.next_rate = agent_rate(a.baseline_rate, a.utility, local_utils, k.utility_speed_gain, k.epsilon);
      res.agents.push_back(as);
    }
  }
  for (const auto& e : res.events.records()) {
    if (const auto* tf = std::get_if<TeamFormedPayload>(&e.payload)) {
      for (int id : tf->terms.members) ++res.agents[static_cast<std::size_t>(id)].teams;
    }
  }

  res.arrived_orders = orders.size();
  for (const auto& o : orders) res.outcomes.arrived += o.subs.size();
  for (double cst : org_costs) res.outcomes.total_cost += cst;
  res.system_utility = system_utility(res.outcomes.completed, org_costs);

  double gross = 0.0;
  for (const auto& o : res.outcomes.completed) gross += o.value * o.speedup();
  res.events.append(end, EventKind::Settlement,
                    SettlementPayload{-1, gross, res.outcomes.total_cost, res.system_utility});

  double revenue = 0.0;
  for (const auto& inst : insts) revenue += inst.processed_value * k.org_value_conversion;
  const double mean_time = completed_times.empty() ? 0.0 : stats::mean(completed_times);
  res.platform_objective = platform_objective(revenue, mean_time, imbalance_sum / static_cast<double>(c.cycle_duration),
                                              k.latency_penalty, k.imbalance_penalty);

  if (!res.outcomes.completed.empty()) {
    std::vector<double> inst_values;
    for (const auto& inst : insts) inst_values.push_back(inst.processed_value);
    res.factors = raw_factors(res.outcomes, inst_values, all_utilities, k.epsilon);
  }
  return res;
}

struct AggregateResult {
  std::vector<RunResult> runs;
  stats::SummaryStats system_utility;
  std::vector<CoopHistory> cooperation;  // per institution, one entry per replication
  std::optional<RawFactors> factors;     // mean over runs that completed anything
};

/// Runs `fn(i)` for i in [0, count) on up to `workers` threads. Results land
/// by index, so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  const auto n = std::min<std::size_t>(workers, count);
  for (std::size_t w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

inline AggregateResult aggregate_runs(std::vector<RunResult> runs) {
  AggregateResult agg;
  agg.runs = std::move(runs);
  std::vector<double> usys;
  std::vector<RawFactors> raws;
  for (const auto& r : agg.runs) {
    usys.push_back(r.system_utility);
    if (r.factors) raws.push_back(*r.factors);
  }
  agg.system_utility = stats::summarize(usys);
  if (!raws.empty()) agg.factors = mean_factors(raws);
  if (!agg.runs.empty()) {
    for (const auto& counts : agg.runs.front().cooperation) agg.cooperation.emplace_back(static_cast<int>(counts.size()));
    for (const auto& r : agg.runs) {
      for (std::size_t i = 0; i < r.cooperation.size(); ++i) agg.cooperation[i].push_run(r.cooperation[i]);
    }
    // The current-run slot holds the last replication.
    for (std::size_t i = 0; i < agg.cooperation.size(); ++i) {
      agg.cooperation[i].set_current(agg.runs.back().cooperation[i]);
    }
  }
  return agg;
}

/// T independent runs; replication r uses replication_seed(master, r).
inline AggregateResult run_replications(const ValidatedScenario& s, std::uint64_t master_seed, int replications,
                                        unsigned workers = default_workers()) {
  if (replications < 1) throw Error("replications must be >= 1");
  std::vector<RunResult> runs(static_cast<std::size_t>(replications));
  parallel_for(runs.size(), workers, [&](std::size_t r) {
    runs[r] = run_simulation(s, replication_seed(master_seed, r));
  });
  return aggregate_runs(std::move(runs));
}

}  // namespace svcmarket
