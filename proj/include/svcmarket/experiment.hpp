#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "svcmarket/engine.hpp"
#include "svcmarket/measurement.hpp"
#include "svcmarket/stats.hpp"

namespace svcmarket {

/// Per-replication individual, organizational and system figures.
struct RunMetrics {
  double individual_mean = 0.0;  // business agents
  double individual_std = 0.0;
  double individual_gini = 0.0;
  double org_mean = 0.0;  // mean U_G over institutions
  double system_utility = 0.0;
};

inline RunMetrics run_metrics(const RunResult& r) {
  RunMetrics m;
  const auto ind = r.business_utilities();
  if (!ind.empty()) {
    m.individual_mean = stats::mean(ind);
    m.individual_std = stats::population_std(ind);
    m.individual_gini = stats::gini(ind);
  }
  std::vector<double> org;
  for (const auto& inst : r.institutions) org.push_back(inst.utility);
  m.org_mean = stats::mean(org);
  m.system_utility = r.system_utility;
  return m;
}

struct TopologyRow {
  TopologyKind kind = TopologyKind::Isolated;
  double individual_mean = 0.0;
  double individual_std = 0.0;
  double individual_gini = 0.0;
  double org_mean = 0.0;
  double gains_pct = 0.0;
  double system_mean = 0.0;
  double system_std = 0.0;
  int rank = 0;
};

struct TopologyComparison {
  TopologyKind reference = TopologyKind::NewmanWatts;
  std::vector<TopologyRow> rows;
  std::vector<std::vector<RunMetrics>> metrics;  // [topology][replication]
  std::vector<AggregateResult> aggregates;       // same order as rows
};

/// Every topology sees replication r with seed replication_seed(master, r),
/// so the order stream of replication r is the same in each. Individual
/// figures are per-run mean, std and Gini of business-agent utilities,
/// averaged over replications. Rank orders topologies by mean U_sys.
inline TopologyComparison compare_topologies(const ValidatedScenario& s, std::span<const TopologyKind> kinds,
                                             int replications, TopologyKind reference,
                                             unsigned workers = default_workers()) {
  if (kinds.size() < 2) throw Error("topology comparison needs at least two topologies");
  if (std::find(kinds.begin(), kinds.end(), reference) == kinds.end()) {
    throw Error("gains reference " + preset_name(reference) + " is not among the compared topologies");
  }
  if (replications < 1) throw Error("replications must be >= 1");
  const auto reps = static_cast<std::size_t>(replications);
  const std::uint64_t master = s->seed;

  std::vector<RunResult> runs(kinds.size() * reps);
  parallel_for(runs.size(), workers, [&](std::size_t job) {
    const auto t = job / reps;
    const auto r = job % reps;
    runs[job] = run_simulation(s.with_topology(kinds[t]), replication_seed(master, r));
  });

  TopologyComparison out;
  out.reference = reference;
  std::vector<std::pair<std::string, double>> for_rank;
  for (std::size_t t = 0; t < kinds.size(); ++t) {
    std::vector<RunResult> mine(std::make_move_iterator(runs.begin() + static_cast<std::ptrdiff_t>(t * reps)),
                                std::make_move_iterator(runs.begin() + static_cast<std::ptrdiff_t>((t + 1) * reps)));
    std::vector<RunMetrics> ms;
    for (const auto& r : mine) ms.push_back(run_metrics(r));
    TopologyRow row;
    row.kind = kinds[t];
    std::vector<double> sys;
    for (const auto& m : ms) {
      row.individual_mean += m.individual_mean;
      row.individual_std += m.individual_std;
      row.individual_gini += m.individual_gini;
      row.org_mean += m.org_mean;
      sys.push_back(m.system_utility);
    }
    const auto n = static_cast<double>(ms.size());
    row.individual_mean /= n;
    row.individual_std /= n;
    row.individual_gini /= n;
    row.org_mean /= n;
    row.system_mean = stats::mean(sys);
    row.system_std = stats::population_std(sys);
    for_rank.emplace_back(preset_name(kinds[t]), row.system_mean);
    out.rows.push_back(row);
    out.metrics.push_back(std::move(ms));
    out.aggregates.push_back(aggregate_runs(std::move(mine)));
  }

  double ref_org = 0.0;
  for (const auto& row : out.rows) {
    if (row.kind == reference) ref_org = row.org_mean;
  }
  for (auto& row : out.rows) {
    row.gains_pct = ref_org != 0.0 ? (row.org_mean - ref_org) / std::abs(ref_org) * 100.0 : 0.0;
  }
  for (const auto& ranked : stats::rank_desc(for_rank)) {
    for (auto& row : out.rows) {
      if (preset_name(row.kind) == ranked.id) row.rank = ranked.rank;
    }
  }
  return out;
}

struct MethodCell {
  MeasurementMethod method = MeasurementMethod::Usys;
  TopologyKind topology = TopologyKind::Isolated;
  RawFactors raw;
  FactorScores scores;
  stats::SummaryStats system_utility;
};

struct MethodRow {
  MeasurementMethod method = MeasurementMethod::Usys;
  FactorScores scores;  // mean over topologies
  double stability = 0.0;
};

struct MethodComparison {
  std::vector<MethodCell> cells;  // method-major
  std::vector<MethodRow> rows;
  FactorBounds bounds;
};

/// Runs every (method, topology) cell with the same replication seeds, so
/// only the measurement criterion differs between methods. Raw factors are
/// averaged over replications, normalized against bounds taken over the
/// whole grid, and averaged over topologies per method.
inline MethodComparison compare_methods(const ValidatedScenario& s, std::span<const MeasurementMethod> methods,
                                        std::span<const TopologyKind> kinds, int replications,
                                        unsigned workers = default_workers()) {
  if (methods.size() < 2) throw Error("method comparison needs at least two methods");
  if (kinds.empty()) throw Error("method comparison needs at least one topology");
  if (replications < 1) throw Error("replications must be >= 1");
  const auto reps = static_cast<std::size_t>(replications);
  const std::uint64_t master = s->seed;
  const std::size_t cells = methods.size() * kinds.size();

  std::vector<std::optional<RawFactors>> raw(cells * reps);
  std::vector<double> usys(cells * reps);
  parallel_for(raw.size(), workers, [&](std::size_t job) {
    const auto cell = job / reps;
    const auto r = job % reps;
    const auto m = methods[cell / kinds.size()];
    const auto k = kinds[cell % kinds.size()];
    auto run = run_simulation(s.with_method(m).with_topology(k), replication_seed(master, r));
    raw[job] = run.factors;
    usys[job] = run.system_utility;
  });

  MethodComparison out;
  std::vector<RawFactors> cell_raw;
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<RawFactors> ok;
    std::vector<double> u;
    for (std::size_t r = 0; r < reps; ++r) {
      if (raw[c * reps + r]) ok.push_back(*raw[c * reps + r]);
      u.push_back(usys[c * reps + r]);
    }
    MethodCell mc;
    mc.method = methods[c / kinds.size()];
    mc.topology = kinds[c % kinds.size()];
    if (ok.empty()) {
      throw EmptyLog(std::string("no completed orders in any replication of ") + std::string(to_string(mc.method)) +
                     "/" + preset_name(mc.topology));
    }
    mc.raw = mean_factors(ok);
    mc.system_utility = stats::summarize(u);
    cell_raw.push_back(mc.raw);
    out.cells.push_back(mc);
  }
  out.bounds = grid_bounds(cell_raw);
  for (auto& c : out.cells) c.scores = score_factors(c.raw, out.bounds);

  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<FactorScores> rows;
    std::vector<double> overall;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      rows.push_back(out.cells[m * kinds.size() + k].scores);
      overall.push_back(rows.back().Overall);
    }
    MethodRow row;
    row.method = methods[m];
    row.scores = mean_scores(rows);
    row.stability = overall.size() >= 2 ? stability_score(overall) : 1.0;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace svcmarket
