#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "svcmarket/experiment.hpp"
#include "svcmarket/io.hpp"

namespace svcmarket {

/// Table of the topology comparison: individual, organizational and system
/// columns plus rank.
inline void write_topology_table(std::ostream& os, const TopologyComparison& cmp) {
  static const std::vector<std::string> cols{"topology",  "kind",     "U_ind_mean", "U_ind_std", "Gini_ind",
                                             "U_org_mean", "Gains_pct", "U_sys_mean", "U_sys_std", "Rank"};
  detail::write_header(os, cols);
  for (const auto& r : cmp.rows) {
    detail::Row row(cols);
    row.set("topology", preset_name(r.kind))
        .set("kind", std::string(to_string(r.kind)))
        .set("U_ind_mean", r.individual_mean)
        .set("U_ind_std", r.individual_std)
        .set("Gini_ind", r.individual_gini)
        .set("U_org_mean", r.org_mean)
        .set("Gains_pct", r.gains_pct)
        .set("U_sys_mean", r.system_mean)
        .set("U_sys_std", r.system_std)
        .set("Rank", r.rank);
    row.write(os);
  }
}

inline void write_topology_outputs(const std::filesystem::path& dir, const TopologyComparison& cmp) {
  {
    auto out = open_out(dir / "topology_table.csv");
    write_topology_table(out, cmp);
  }
  {
    static const std::vector<std::string> cols{"topology",  "replication", "seed",     "U_ind_mean",
                                               "U_ind_std", "Gini_ind",    "U_org_mean", "system_utility"};
    auto out = open_out(dir / "topology_runs.csv");
    detail::write_header(out, cols);
    for (std::size_t t = 0; t < cmp.rows.size(); ++t) {
      for (std::size_t r = 0; r < cmp.metrics[t].size(); ++r) {
        const auto& m = cmp.metrics[t][r];
        detail::Row row(cols);
        row.set("topology", preset_name(cmp.rows[t].kind))
            .set("replication", static_cast<std::uint64_t>(r))
            .set("seed", cmp.aggregates[t].runs[r].scenario.seed)
            .set("U_ind_mean", m.individual_mean)
            .set("U_ind_std", m.individual_std)
            .set("Gini_ind", m.individual_gini)
            .set("U_org_mean", m.org_mean)
            .set("system_utility", m.system_utility);
        row.write(out);
      }
    }
  }
  {
    static const std::vector<std::string> cols{"topology", "replication", "agent", "institution", "utility"};
    auto out = open_out(dir / "individual_utilities.csv");
    detail::write_header(out, cols);
    for (std::size_t t = 0; t < cmp.rows.size(); ++t) {
      const auto& runs = cmp.aggregates[t].runs;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& a : runs[r].agents) {
          if (a.kind != AgentKind::BusinessAgent) continue;
          detail::Row row(cols);
          row.set("topology", preset_name(cmp.rows[t].kind))
              .set("replication", static_cast<std::uint64_t>(r))
              .set("agent", a.id)
              .set("institution", static_cast<char>('A' + a.institution))
              .set("utility", a.utility);
          row.write(out);
        }
      }
    }
  }
  {
    // Cumulative U_org per institution, averaged over institutions and
    // replications.
    static const std::vector<std::string> cols{"topology", "tick", "org_cumulative"};
    auto out = open_out(dir / "org_series.csv");
    detail::write_header(out, cols);
    for (std::size_t t = 0; t < cmp.rows.size(); ++t) {
      const auto& runs = cmp.aggregates[t].runs;
      const auto ticks = runs.front().series.size();
      for (std::size_t k = 0; k < ticks; ++k) {
        double sum = 0.0;
        for (const auto& r : runs) sum += r.series[k].org_cumulative / static_cast<double>(r.institutions.size());
        detail::Row row(cols);
        row.set("topology", preset_name(cmp.rows[t].kind))
            .set("tick", runs.front().series[k].tick)
            .set("org_cumulative", sum / static_cast<double>(runs.size()));
        row.write(out);
      }
    }
  }
  {
    static const std::vector<std::string> cols{"topology", "tick", "system_flow", "system_cumulative"};
    auto out = open_out(dir / "system_series.csv");
    detail::write_header(out, cols);
    for (std::size_t t = 0; t < cmp.rows.size(); ++t) {
      for (const auto& p : cmp.aggregates[t].runs.front().series) {
        detail::Row row(cols);
        row.set("topology", preset_name(cmp.rows[t].kind))
            .set("tick", p.tick)
            .set("system_flow", p.system_flow)
            .set("system_cumulative", p.system_cumulative);
        row.write(out);
      }
    }
  }
}

inline Json topology_summary_json(const TopologyComparison& cmp, const ScenarioConfig& scenario, int replications) {
  Json j;
  j["experiment"] = "compare-topologies";
  j["seed"] = scenario.seed;
  j["replications"] = replications;
  j["gains_reference"] = preset_name(cmp.reference);
  j["scenario"] = scenario_to_json(scenario);
  Json rows = Json::array();
  for (const auto& r : cmp.rows) {
    rows.push_back({{"topology", preset_name(r.kind)},
                    {"kind", std::string(to_string(r.kind))},
                    {"U_ind_mean", r.individual_mean},
                    {"U_ind_std", r.individual_std},
                    {"Gini_ind", r.individual_gini},
                    {"U_org_mean", r.org_mean},
                    {"Gains_pct", r.gains_pct},
                    {"U_sys_mean", r.system_mean},
                    {"U_sys_std", r.system_std},
                    {"Rank", r.rank}});
  }
  j["topologies"] = rows;
  return j;
}

inline void write_method_outputs(const std::filesystem::path& dir, const MethodComparison& cmp) {
  static const std::vector<std::string> score_cols{"IL", "Trly", "SuS", "Sp", "LG", "Fair", "Overall"};
  const auto put_scores = [](detail::Row& row, const FactorScores& s) {
    row.set("IL", s.IL).set("Trly", s.Trly).set("SuS", s.SuS).set("Sp", s.Sp).set("LG", s.LG).set("Fair", s.Fair).set(
        "Overall", s.Overall);
  };
  {
    std::vector<std::string> cols{"method"};
    cols.insert(cols.end(), score_cols.begin(), score_cols.end());
    auto out = open_out(dir / "method_table.csv");
    detail::write_header(out, cols);
    for (const auto& r : cmp.rows) {
      detail::Row row(cols);
      row.set("method", std::string(to_string(r.method)));
      put_scores(row, r.scores);
      row.write(out);
    }
  }
  {
    std::vector<std::string> cols{"method", "topology"};
    cols.insert(cols.end(), score_cols.begin(), score_cols.end());
    for (const char* c : {"mean_latency", "latency_std", "success_rate", "mean_speedup", "load_gini", "fairness_gini",
                          "U_sys_mean", "U_sys_std"}) {
      cols.emplace_back(c);
    }
    auto out = open_out(dir / "method_grid.csv");
    detail::write_header(out, cols);
    for (const auto& c : cmp.cells) {
      detail::Row row(cols);
      row.set("method", std::string(to_string(c.method))).set("topology", preset_name(c.topology));
      put_scores(row, c.scores);
      row.set("mean_latency", c.raw.mean_latency)
          .set("latency_std", c.raw.latency_std)
          .set("success_rate", c.raw.success_rate)
          .set("mean_speedup", c.raw.mean_speedup)
          .set("load_gini", c.raw.load_gini)
          .set("fairness_gini", c.raw.fairness_gini)
          .set("U_sys_mean", c.system_utility.mean)
          .set("U_sys_std", c.system_utility.std);
      row.write(out);
    }
  }
  {
    static const std::vector<std::string> cols{"method", "stability"};
    auto out = open_out(dir / "stability.csv");
    detail::write_header(out, cols);
    for (const auto& r : cmp.rows) {
      detail::Row row(cols);
      row.set("method", std::string(to_string(r.method))).set("stability", r.stability);
      row.write(out);
    }
  }
}

inline Json method_summary_json(const MethodComparison& cmp, const ScenarioConfig& scenario, int replications) {
  Json j;
  j["experiment"] = "compare-methods";
  j["seed"] = scenario.seed;
  j["replications"] = replications;
  j["scenario"] = scenario_to_json(scenario);
  Json rows = Json::array();
  for (const auto& r : cmp.rows) {
    rows.push_back({{"method", std::string(to_string(r.method))},
                    {"IL", r.scores.IL},
                    {"Trly", r.scores.Trly},
                    {"SuS", r.scores.SuS},
                    {"Sp", r.scores.Sp},
                    {"LG", r.scores.LG},
                    {"Fair", r.scores.Fair},
                    {"Overall", r.scores.Overall},
                    {"stability", r.stability}});
  }
  j["methods"] = rows;
  return j;
}

}  // namespace svcmarket
