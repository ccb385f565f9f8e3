#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "svcmarket/config.hpp"
#include "svcmarket/engine.hpp"

namespace svcmarket {

/// Creates `dir`. An existing non-empty directory is refused unless
/// `overwrite` is set.
inline void prepare_output_dir(const std::filesystem::path& dir, bool overwrite) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw Error(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !overwrite) {
      throw OutputExists(dir.string() + " already holds results; pass --overwrite to replace them");
    }
  }
  fs::create_directories(dir);
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

namespace detail {

inline std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    s += format_number(xs[i]);
  }
  return s;
}

inline std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(xs[i]);
  }
  return s;
}

/// One CSV row built column by column against a fixed header.
class Row {
 public:
  explicit Row(const std::vector<std::string>& header) : header_(header), cells_(header.size()) {}

  Row& set(const std::string& col, std::string value) {
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (header_[i] == col) {
        cells_[i] = std::move(value);
        return *this;
      }
    }
    throw Error("unknown CSV column " + col);
  }
  Row& set(const std::string& col, double v) { return set(col, format_number(v)); }
  Row& set(const std::string& col, int v) { return set(col, std::to_string(v)); }
  Row& set(const std::string& col, std::int64_t v) { return set(col, std::to_string(v)); }
  Row& set(const std::string& col, std::uint64_t v) { return set(col, std::to_string(v)); }
  Row& set(const std::string& col, char c) { return set(col, std::string(1, c)); }

  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (i) os << ',';
      os << cells_[i];
    }
    os << '\n';
  }

 private:
  const std::vector<std::string>& header_;
  std::vector<std::string> cells_;
};

inline void write_header(std::ostream& os, const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
}

inline void put_terms(Row& row, const ExecutionTerms& t) {
  row.set("members", join(t.members))
      .set("shares", join(t.shares))
      .set("rates", join(t.rates))
      .set("workload", t.workload)
      .set("sum_rate", t.sum_rate)
      .set("mean_occupancy", t.mean_occupancy)
      .set("team_size", t.team_size)
      .set("realized_time", t.realized_time)
      .set("reference_time", t.reference_time);
}

}  // namespace detail

inline const std::vector<std::string>& event_columns() {
  static const std::vector<std::string> cols{
      "seq",          "tick",           "kind",           "order",          "sub",
      "letter",       "institution",    "otype",          "complexity",     "estimated_utility",
      "robot_occupancy", "business_occupancy", "score",   "candidates",     "members",
      "shares",       "rates",          "workload",       "sum_rate",       "mean_occupancy",
      "team_size",    "realized_time",  "reference_time", "completion_tick", "business_members",
      "parent_completed", "parent_realized_time", "state", "created_value",  "cost",
      "utility"};
  return cols;
}

inline void write_event_row(std::ostream& os, const EventRecord& e) {
  const auto& cols = event_columns();
  detail::Row row(cols);
  row.set("seq", e.seq).set("tick", e.tick).set("kind", std::string(to_string(e.kind)));
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ArrivalPayload>) {
          row.set("order", p.order).set("otype", p.otype).set("complexity", p.complexity);
        } else if constexpr (std::is_same_v<P, AssignmentPayload>) {
          row.set("order", p.order)
              .set("sub", p.sub)
              .set("letter", p.letter)
              .set("institution", p.institution)
              .set("estimated_utility", p.estimated_utility)
              .set("robot_occupancy", p.robot_occupancy)
              .set("business_occupancy", p.business_occupancy)
              .set("score", p.score)
              .set("candidates", p.candidates);
        } else if constexpr (std::is_same_v<P, TeamFormedPayload>) {
          row.set("order", p.order).set("sub", p.sub).set("letter", p.letter).set("institution", p.institution);
          detail::put_terms(row, p.terms);
          row.set("completion_tick", p.completion_tick).set("business_members", p.business_members);
        } else if constexpr (std::is_same_v<P, CompletionPayload>) {
          row.set("order", p.order)
              .set("sub", p.sub)
              .set("letter", p.letter)
              .set("institution", p.institution)
              .set("complexity", p.complexity);
          detail::put_terms(row, p.terms);
          row.set("parent_completed", p.parent_completed ? 1 : 0)
              .set("parent_realized_time", p.parent_completed ? format_number(p.parent_realized_time) : "");
        } else if constexpr (std::is_same_v<P, ExpiryPayload>) {
          row.set("order", p.order).set("sub", p.sub).set("letter", p.letter).set("state", p.state);
        } else if constexpr (std::is_same_v<P, SettlementPayload>) {
          row.set("institution", p.institution)
              .set("created_value", p.created_value)
              .set("cost", p.cost)
              .set("utility", p.utility);
        }
      },
      e.payload);
  row.write(os);
}

inline void write_events_csv(std::ostream& os, const EventLog& log) {
  detail::write_header(os, event_columns());
  for (const auto& e : log.records()) write_event_row(os, e);
}

/// Settlement-time utilities at agent, institution and system level.
inline void write_ledger_csv(std::ostream& os, const RunResult& r) {
  static const std::vector<std::string> cols{"cycle", "level", "id",      "institution", "kind",
                                             "degree", "created_value", "cost", "utility", "next_rate"};
  detail::write_header(os, cols);
  for (const auto& a : r.agents) {
    detail::Row row(cols);
    const double cost = a.kind == AgentKind::Robot ? r.scenario.agents_per_institution.robot_maintenance : 0.0;
    row.set("cycle", 0)
        .set("level", std::string("agent"))
        .set("id", a.id)
        .set("institution", a.institution)
        .set("kind", std::string(to_string(a.kind)))
        .set("degree", a.degree)
        .set("created_value", a.created_value)
        .set("cost", cost)
        .set("utility", a.utility)
        .set("next_rate", a.next_rate);
    row.write(os);
  }
  for (const auto& inst : r.institutions) {
    detail::Row row(cols);
    row.set("cycle", 0)
        .set("level", std::string("institution"))
        .set("id", inst.id)
        .set("institution", inst.id)
        .set("kind", inst.letter)
        .set("created_value", inst.processed_value)
        .set("cost", inst.cost)
        .set("utility", inst.utility);
    row.write(os);
  }
  detail::Row row(cols);
  double gross = 0.0;
  for (const auto& o : r.outcomes.completed) gross += o.value * o.speedup();
  row.set("cycle", 0)
      .set("level", std::string("system"))
      .set("id", -1)
      .set("created_value", gross)
      .set("cost", r.outcomes.total_cost)
      .set("utility", r.system_utility);
  row.write(os);
}

inline void write_timeseries_csv(std::ostream& os, const RunResult& r) {
  static const std::vector<std::string> cols{"tick",           "arrivals",           "completions", "pending",
                                             "mean_occupancy", "occupancy_variance", "system_flow", "org_flow",
                                             "system_cumulative", "org_cumulative"};
  detail::write_header(os, cols);
  for (const auto& p : r.series) {
    detail::Row row(cols);
    row.set("tick", p.tick)
        .set("arrivals", p.arrivals)
        .set("completions", p.completions)
        .set("pending", static_cast<std::uint64_t>(p.pending))
        .set("mean_occupancy", p.mean_occupancy)
        .set("occupancy_variance", p.occupancy_variance)
        .set("system_flow", p.system_flow)
        .set("org_flow", p.org_flow)
        .set("system_cumulative", p.system_cumulative)
        .set("org_cumulative", p.org_cumulative);
    row.write(os);
  }
}

inline Json raw_factors_json(const RawFactors& f) {
  return {{"mean_latency", f.mean_latency}, {"latency_std", f.latency_std},   {"success_rate", f.success_rate},
          {"mean_speedup", f.mean_speedup}, {"load_gini", f.load_gini},       {"fairness_gini", f.fairness_gini}};
}

inline Json summary_stats_json(const stats::SummaryStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
}

/// Run statistics plus the resolved scenario and seed.
inline Json run_summary_json(const RunResult& r) {
  Json j;
  j["seed"] = r.scenario.seed;
  j["scenario"] = scenario_to_json(r.scenario);
  j["system_utility"] = r.system_utility;
  j["platform_objective"] = r.platform_objective;
  j["arrived_orders"] = r.arrived_orders;
  j["arrived_sub_orders"] = r.outcomes.arrived;
  j["completed_orders"] = r.completed_orders;
  j["completed_sub_orders"] = r.outcomes.completed.size();
  j["expired_sub_orders"] = r.expired_subs;
  j["total_cost"] = r.outcomes.total_cost;
  j["raw_factors"] = r.factors ? raw_factors_json(*r.factors) : Json(nullptr);

  std::vector<double> robots, business;
  for (const auto& a : r.agents) (a.kind == AgentKind::Robot ? robots : business).push_back(a.utility);
  j["robot_utility"] = robots.empty() ? Json(nullptr) : summary_stats_json(stats::summarize(robots));
  j["business_utility"] = business.empty() ? Json(nullptr) : summary_stats_json(stats::summarize(business));
  j["business_utility_gini"] = business.empty() ? 0.0 : stats::gini(business);

  Json insts = Json::array();
  for (const auto& inst : r.institutions) {
    insts.push_back({{"id", inst.id},
                     {"letter", std::string(1, inst.letter)},
                     {"processed_value", inst.processed_value},
                     {"cost", inst.cost},
                     {"utility", inst.utility},
                     {"completed_sub_orders", inst.completed},
                     {"edges", inst.edges},
                     {"avg_degree", inst.structure.avg_degree},
                     {"clustering_coefficient", inst.structure.clustering_coefficient},
                     {"avg_path_length", inst.structure.avg_path_length},
                     {"disconnected", inst.structure.disconnected}});
  }
  j["institutions"] = insts;
  return j;
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

/// events.csv, ledger.csv, timeseries.csv, graphs.txt and summary.json for
/// one run.
inline void write_run(const std::filesystem::path& dir, const RunResult& r) {
  {
    auto out = open_out(dir / "events.csv");
    write_events_csv(out, r.events);
  }
  {
    auto out = open_out(dir / "ledger.csv");
    write_ledger_csv(out, r);
  }
  {
    auto out = open_out(dir / "timeseries.csv");
    write_timeseries_csv(out, r);
  }
  {
    auto out = open_out(dir / "graphs.txt");
    for (std::size_t i = 0; i < r.graphs.size(); ++i) {
      out << "# institution " << static_cast<char>('A' + i) << '\n';
      write_edge_list(out, r.graphs[i]);
    }
  }
  write_json(dir / "summary.json", run_summary_json(r));
}

// ---------------------------------------------------------------------------
// Reading results back

/// A CSV file as header plus string cells. Fields never contain commas in
/// the files this tool writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error("missing column " + name);
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& name) const {
    const auto c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
    return out;
  }

  [[nodiscard]] std::vector<std::string> strings(const std::string& name) const {
    const auto c = column(name);
    std::vector<std::string> out;
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (std::getline(in, line)) t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv_line(line));
  }
  return t;
}

}  // namespace svcmarket
