#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "svcmarket/core.hpp"
#include "svcmarket/stats.hpp"

namespace svcmarket {

// ---------------------------------------------------------------------------
// Multi-level utilities

/// U_r = sum_o share * O_dv - C_r, with the share-weighted value already
/// summed into `created_value`.
inline double robot_utility(double created_value, double maintenance_cost) {
  return created_value - maintenance_cost;
}

inline double robot_utility(const Agent& r) {
  if (r.kind != AgentKind::Robot) throw KindMismatch("robot_utility on a business agent");
  return robot_utility(r.created_value, r.maintenance_cost_per_cycle);
}

/// U_p = B + O_vr * sum_o share * O_dv.
inline double business_utility(double base_income, double created_value, double income_conversion) {
  return base_income + created_value * income_conversion;
}

inline double business_utility(const Agent& p, double income_conversion) {
  if (p.kind != AgentKind::BusinessAgent) throw KindMismatch("business_utility on a robot");
  return business_utility(p.base_income, p.created_value, income_conversion);
}

struct OrgUtility {
  double created_value = 0.0;  // CV_G
  double cost = 0.0;           // C_G
  double utility = 0.0;        // U_G
};

/// CV_G, C_G = sum C_r + sum U_p, and U_G = CV_G * G_vr - C_G.
inline OrgUtility org_utility(double created_value, std::span<const double> robot_costs,
                              std::span<const double> business_utilities, double org_value_conversion) {
  OrgUtility u;
  u.created_value = created_value;
  for (double c : robot_costs) u.cost += c;
  for (double p : business_utilities) u.cost += p;
  u.utility = created_value * org_value_conversion - u.cost;
  return u;
}

inline OrgUtility org_utility(const Institution& inst, double income_conversion, double org_value_conversion) {
  std::vector<double> robot_costs;
  std::vector<double> business;
  for (const auto& a : inst.agents) {
    if (a.is_robot()) {
      robot_costs.push_back(a.maintenance_cost_per_cycle);
    } else {
      business.push_back(business_utility(a, income_conversion));
    }
  }
  return org_utility(inst.processed_value, robot_costs, business, org_value_conversion);
}

/// One completed sub-order as the measurement layer sees it.
struct Outcome {
  double value = 0.0;
  std::optional<double> reference_time;
  double realized_time = 0.0;

  [[nodiscard]] double speedup() const {
    if (!reference_time) throw MissingReferenceTime("completed order without reference time");
    return *reference_time / realized_time;
  }
};

/// U_sys = sum_o O_dv T_e / T_rly - sum_G C_G.
inline double system_utility(std::span<const Outcome> completed, std::span<const double> org_costs) {
  double total = 0.0;
  for (const auto& o : completed) total += o.value * o.speedup();
  for (double c : org_costs) total -= c;
  return total;
}

// ---------------------------------------------------------------------------
// Measurement criteria

/// Predicted outcome of one order under a candidate plan.
struct OrderEstimate {
  double value = 0.0;
  double reference_time = 0.0;
  double predicted_time = 0.0;
  double predicted_cost = 0.0;

  [[nodiscard]] double speedup() const {
    return predicted_time > 0.0 ? reference_time / predicted_time : 0.0;
  }
};

inline double weighted_mean3(const std::array<double, 3>& w, double a, double b, double c) {
  const double total = w[0] + w[1] + w[2];
  return total > 0.0 ? (w[0] * a + w[1] * b + w[2] * c) / total : 0.0;
}

/// How a measurement criterion values one predicted order. Usys is the
/// per-order term of the system utility (value times speedup minus the cost
/// it triggers). The baselines apply their log-level formulas to the single
/// order, so they are bounded.
inline double order_score(MeasurementMethod m, const OrderEstimate& e, const BaselineWeights& w = {}) {
  if (!(e.predicted_time > 0.0)) return -std::numeric_limits<double>::infinity();
  const double sp = e.speedup();
  switch (m) {
    case MeasurementMethod::Usys:
      return e.value * sp - e.predicted_cost;
    case MeasurementMethod::DM: {
      const double benefit = e.value * sp;
      const double net = benefit + e.predicted_cost > 0.0 ? benefit / (benefit + e.predicted_cost) : 0.0;
      return weighted_mean3(w.dm, std::min(1.0, sp), 1.0, net);
    }
    case MeasurementMethod::QoS: {
      const double rev_latency = e.reference_time / (e.reference_time + e.predicted_time);
      const double reliable = e.predicted_time <= e.reference_time ? 1.0 : 0.0;
      const double rev_cost = e.value + e.predicted_cost > 0.0 ? e.value / (e.value + e.predicted_cost) : 0.0;
      return weighted_mean3(w.qos, rev_latency, reliable, rev_cost);
    }
    case MeasurementMethod::SaL:
      return std::clamp((e.reference_time - e.predicted_time) / e.reference_time, -1.0, 1.0);
  }
  return 0.0;
}

/// Everything the log-level measures read from one run.
struct OutcomeLog {
  std::vector<Outcome> completed;
  std::size_t arrived = 0;  // sub-orders that entered the system
  double total_cost = 0.0;  // sum of C_G
};

/// D&M from (quality, usage, net benefit) components.
inline double dm_aggregate(double quality, double usage, double net_benefit, const BaselineWeights& w = {}) {
  return weighted_mean3(w.dm, quality, usage, net_benefit);
}

/// QoS from (reverse latency, reliability, reverse cost) components.
inline double qos_aggregate(double rev_latency, double reliability, double rev_cost,
                            const BaselineWeights& w = {}) {
  return weighted_mean3(w.qos, rev_latency, reliability, rev_cost);
}

/// Log-level score of `m` over a complete run. Usys returns U_sys itself.
inline double baseline_score(MeasurementMethod m, const OutcomeLog& log, const BaselineWeights& w = {}) {
  if (log.arrived == 0 || log.completed.empty()) {
    if (m == MeasurementMethod::Usys) return -log.total_cost;
    throw EmptyLog("baseline score needs at least one completed order");
  }
  const auto n = static_cast<double>(log.completed.size());
  double speed_q = 0.0, rev_lat = 0.0, gap = 0.0, weighted = 0.0, raw_value = 0.0;
  std::size_t success = 0;
  for (const auto& o : log.completed) {
    const double sp = o.speedup();
    const double te = *o.reference_time;
    speed_q += std::min(1.0, sp);
    rev_lat += te / (te + o.realized_time);
    gap += std::clamp((te - o.realized_time) / te, -1.0, 1.0);
    weighted += o.value * sp;
    raw_value += o.value;
    if (o.realized_time <= te) ++success;
  }
  const double arrived = static_cast<double>(log.arrived);
  switch (m) {
    case MeasurementMethod::Usys:
      return weighted - log.total_cost;
    case MeasurementMethod::DM: {
      const double net = weighted + log.total_cost > 0.0 ? weighted / (weighted + log.total_cost) : 0.0;
      return dm_aggregate(speed_q / n, n / arrived, net, w);
    }
    case MeasurementMethod::QoS: {
      const double rev_cost = raw_value + log.total_cost > 0.0 ? raw_value / (raw_value + log.total_cost) : 0.0;
      return qos_aggregate(rev_lat / n, static_cast<double>(success) / arrived, rev_cost, w);
    }
    case MeasurementMethod::SaL:
      return gap / n;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Outcome factors

/// Un-normalized factor inputs of one run (or the mean over replications).
struct RawFactors {
  double mean_latency = 0.0;   // mean T_rly, cost-type
  double latency_std = 0.0;    // std T_rly, cost-type
  double success_rate = 0.0;   // completed with T_rly <= T_e over arrived
  double mean_speedup = 0.0;   // mean T_e / T_rly
  double load_gini = 0.0;      // Gini of institution processed value, cost-type
  double fairness_gini = 0.0;  // Gini of shifted individual utilities, cost-type

  static constexpr std::size_t kCount = 6;

  [[nodiscard]] std::array<double, kCount> as_array() const {
    return {mean_latency, latency_std, success_rate, mean_speedup, load_gini, fairness_gini};
  }
};

/// Factor inputs from one run's outcomes.
inline RawFactors raw_factors(const OutcomeLog& log, std::span<const double> institution_values,
                              std::span<const double> individual_utilities, double epsilon) {
  if (log.completed.empty()) throw EmptyLog("factor scores need at least one completed order");
  std::vector<double> times;
  std::vector<double> speedups;
  std::size_t success = 0;
  for (const auto& o : log.completed) {
    times.push_back(o.realized_time);
    speedups.push_back(o.speedup());
    if (o.realized_time <= *o.reference_time) ++success;
  }
  RawFactors r;
  r.mean_latency = stats::mean(times);
  r.latency_std = stats::population_std(times);
  r.success_rate = log.arrived > 0 ? static_cast<double>(success) / static_cast<double>(log.arrived) : 0.0;
  r.mean_speedup = stats::mean(speedups);
  r.load_gini = stats::gini(institution_values);
  if (!individual_utilities.empty()) {
    // Utilities may be negative; shift so the minimum sits at epsilon.
    const double lo = *std::min_element(individual_utilities.begin(), individual_utilities.end());
    std::vector<double> shifted;
    shifted.reserve(individual_utilities.size());
    for (double u : individual_utilities) shifted.push_back(u - lo + epsilon);
    r.fairness_gini = stats::gini(shifted);
  }
  return r;
}

inline RawFactors mean_factors(std::span<const RawFactors> runs) {
  RawFactors m;
  if (runs.empty()) return m;
  for (const auto& r : runs) {
    m.mean_latency += r.mean_latency;
    m.latency_std += r.latency_std;
    m.success_rate += r.success_rate;
    m.mean_speedup += r.mean_speedup;
    m.load_gini += r.load_gini;
    m.fairness_gini += r.fairness_gini;
  }
  const auto n = static_cast<double>(runs.size());
  m.mean_latency /= n;
  m.latency_std /= n;
  m.success_rate /= n;
  m.mean_speedup /= n;
  m.load_gini /= n;
  m.fairness_gini /= n;
  return m;
}

struct FactorBounds {
  std::array<double, RawFactors::kCount> lo{};
  std::array<double, RawFactors::kCount> hi{};
};

/// Shared normalization bounds over a whole comparison grid.
inline FactorBounds grid_bounds(std::span<const RawFactors> cells) {
  FactorBounds b;
  b.lo.fill(std::numeric_limits<double>::infinity());
  b.hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& c : cells) {
    const auto a = c.as_array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      b.lo[i] = std::min(b.lo[i], a[i]);
      b.hi[i] = std::max(b.hi[i], a[i]);
    }
  }
  return b;
}

/// Higher-is-better factor scores in [0,1]. Overall is their exact mean.
struct FactorScores {
  double IL = 0.0;
  double Trly = 0.0;
  double SuS = 0.0;
  double Sp = 0.0;
  double LG = 0.0;
  double Fair = 0.0;
  double Overall = 0.0;

  [[nodiscard]] std::array<double, 6> factors() const { return {IL, Trly, SuS, Sp, LG, Fair}; }
};

inline double overall_of(double il, double trly, double sus, double sp, double lg, double fair) {
  return (il + trly + sus + sp + lg + fair) / 6.0;
}

/// Normalizes one cell against grid bounds. Cost-type factors are reversed
/// after normalization. A factor whose bounds collapse scores 1 everywhere.
inline FactorScores score_factors(const RawFactors& raw, const FactorBounds& b) {
  const auto a = raw.as_array();
  constexpr std::array<bool, RawFactors::kCount> cost_type{true, true, false, false, true, true};
  std::array<double, RawFactors::kCount> s{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(b.hi[i] > b.lo[i])) {
      s[i] = 1.0;
      continue;
    }
    const double n = stats::minmax_normalize(a[i], b.lo[i], b.hi[i]);
    s[i] = cost_type[i] ? 1.0 - n : n;
  }
  FactorScores f{s[0], s[1], s[2], s[3], s[4], s[5], 0.0};
  f.Overall = overall_of(f.IL, f.Trly, f.SuS, f.Sp, f.LG, f.Fair);
  return f;
}

/// Scores every cell of a grid against the grid's own bounds.
inline std::vector<FactorScores> factor_scores(std::span<const RawFactors> cells) {
  const auto b = grid_bounds(cells);
  std::vector<FactorScores> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(score_factors(c, b));
  return out;
}

/// Mean of several score rows; Overall is recomputed from the averaged
/// factors, which equals the mean of the rows' Overall values.
inline FactorScores mean_scores(std::span<const FactorScores> rows) {
  FactorScores m;
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.IL += r.IL;
    m.Trly += r.Trly;
    m.SuS += r.SuS;
    m.Sp += r.Sp;
    m.LG += r.LG;
    m.Fair += r.Fair;
  }
  const auto n = static_cast<double>(rows.size());
  m.IL /= n;
  m.Trly /= n;
  m.SuS /= n;
  m.Sp /= n;
  m.LG /= n;
  m.Fair /= n;
  m.Overall = overall_of(m.IL, m.Trly, m.SuS, m.Sp, m.LG, m.Fair);
  return m;
}

/// 1 - std(Overall) / 0.5, where 0.5 is the largest population std of
/// values confined to [0,1].
inline double stability_score(std::span<const double> overall) {
  if (overall.size() < 2) throw Error("stability score needs at least two topologies");
  return 1.0 - stats::population_std(overall) / 0.5;
}

}  // namespace svcmarket
