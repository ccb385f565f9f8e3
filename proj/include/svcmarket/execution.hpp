#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "svcmarket/core.hpp"

namespace svcmarket {

/// committed / (s^0 * horizon), clamped to [0,1].
inline double occupancy(double committed_workload, double baseline_rate, int horizon) {
  const double window = baseline_rate * static_cast<double>(horizon);
  if (!(window > 0.0)) return 1.0;
  return std::clamp(committed_workload / window, 0.0, 1.0);
}

inline double occupancy(const Agent& a, int horizon) {
  return occupancy(a.committed_workload, a.baseline_rate, horizon);
}

/// W(o) = omega0 + omega1 * O_dv.
inline double workload(double complexity, double omega0, double omega1) {
  return omega0 + omega1 * complexity;
}

/// (U_a - min U) / (max U - min U + eps).
inline double normalized_utility(double u, std::span<const double> all, double epsilon) {
  if (all.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(all.begin(), all.end());
  return (u - *lo) / (*hi - *lo + epsilon);
}

/// s_a = s^0 * (1 + lambda_u * normalized utility).
inline double agent_rate(double baseline_rate, double u, std::span<const double> all,
                         double lambda_u, double epsilon) {
  return baseline_rate * (1.0 + lambda_u * normalized_utility(u, all, epsilon));
}

/// Workload-capacity-congestion completion time:
/// W / sum(s) * (1 + lambda_rho * mean occupancy) * (1 + lambda_c * (|A| - 1)).
inline double completion_time(double work, double sum_rate, double mean_occupancy, int team_size,
                              double lambda_rho, double lambda_c) {
  if (!(sum_rate > 0.0)) throw ZeroCapacity("team has zero processing rate");
  return work / sum_rate * (1.0 + lambda_rho * mean_occupancy) *
         (1.0 + lambda_c * static_cast<double>(team_size - 1));
}

inline double completion_time(double work, std::span<const double> rates, std::span<const double> occupancies,
                              double lambda_rho, double lambda_c) {
  double sum = 0.0;
  for (double r : rates) sum += r;
  double occ = 0.0;
  for (double o : occupancies) occ += o;
  const double mean_occ = occupancies.empty() ? 0.0 : occ / static_cast<double>(occupancies.size());
  return completion_time(work, sum, mean_occ, static_cast<int>(rates.size()), lambda_rho, lambda_c);
}

/// Running mean of realized times per complexity level, used as T_e.
class ReferenceHistory {
 public:
  void record(int complexity, double realized_time) {
    auto& b = bucket(complexity);
    b.sum += realized_time;
    ++b.count;
  }

  [[nodiscard]] std::size_t count(int complexity) const { return bucket(complexity).count; }

  /// Mean historical time for the complexity, or the cold-start estimate
  /// W / mean baseline rate when nothing has been recorded.
  [[nodiscard]] double reference_time(int complexity, double work, double mean_baseline_rate) const {
    const auto& b = bucket(complexity);
    if (b.count > 0) return b.sum / static_cast<double>(b.count);
    return work / mean_baseline_rate;
  }

 private:
  struct Bucket {
    double sum = 0.0;
    std::size_t count = 0;
  };

  Bucket& bucket(int c) { return buckets_.at(static_cast<std::size_t>(std::clamp(c, 0, 3))); }
  [[nodiscard]] const Bucket& bucket(int c) const {
    return buckets_.at(static_cast<std::size_t>(std::clamp(c, 0, 3)));
  }

  std::array<Bucket, 4> buckets_{};
};

/// sum_a share_a * value - phi * |A|. Shares sum to one, so the first term
/// is the order value under whatever criterion produced it.
inline double collaboration_utility(std::span<const double> shares, double value, double phi) {
  double total = 0.0;
  for (double s : shares) total += s * value;
  return total - phi * static_cast<double>(shares.size());
}

/// A candidate or committed team inside one institution. Members are local
/// node indices; shares are proportional to effective rates.
struct TeamPlan {
  std::vector<int> members;
  std::vector<double> rates;
  std::vector<double> occupancies;
  std::vector<double> shares;
  double work = 0.0;
  double sum_rate = 0.0;
  double mean_occupancy = 0.0;
  double predicted_time = 0.0;
  int business_members = 0;
  double business_share = 0.0;  // sum of business agents' shares
};

inline TeamPlan make_plan(const Institution& inst, std::span<const int> members, double work,
                          const Coefficients& k) {
  TeamPlan p;
  p.members.assign(members.begin(), members.end());
  p.work = work;
  for (int m : members) {
    const auto& a = inst.agents.at(static_cast<std::size_t>(m));
    p.rates.push_back(a.effective_rate);
    p.occupancies.push_back(occupancy(a, k.occupancy_horizon));
    p.sum_rate += a.effective_rate;
    p.mean_occupancy += p.occupancies.back();
  }
  p.mean_occupancy /= static_cast<double>(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    p.shares.push_back(p.rates[i] / p.sum_rate);
    if (!inst.agents[static_cast<std::size_t>(members[i])].is_robot()) {
      ++p.business_members;
      p.business_share += p.shares.back();
    }
  }
  p.predicted_time = completion_time(work, p.sum_rate, p.mean_occupancy, static_cast<int>(members.size()),
                                     k.congestion, k.team_size_delay);
  return p;
}

/// Agents whose occupancy leaves room for more work.
inline bool available(const Agent& a, int horizon) { return occupancy(a, horizon) < 1.0; }

/// Seed of a team: the least-occupied available agent allowed to anchor an
/// order of this complexity (any agent for easy orders, a business agent for
/// hard ones). Equal occupancy goes to the agent with less work assigned so
/// far, then to the lowest node index.
inline std::optional<int> pick_seed(const Institution& inst, int complexity, const Coefficients& k) {
  const bool hard = complexity > k.robot_threshold;
  std::optional<int> best;
  double best_occ = std::numeric_limits<double>::infinity();
  double best_load = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.agents.size(); ++i) {
    const auto& a = inst.agents[i];
    if (hard && a.is_robot()) continue;
    const double occ = occupancy(a, k.occupancy_horizon);
    if (occ >= 1.0) continue;
    if (occ < best_occ || (occ == best_occ && a.assigned_workload < best_load)) {
      best_occ = occ;
      best_load = a.assigned_workload;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Forms the team for one sub-order. Starting from the seed, the seed's
/// available graph neighbours are added one at a time, each time taking the
/// one that most increases the collaboration utility
///   score(plan) - phi * |A|,
/// and stopping when no addition increases it. `score` rates a plan under
/// the active measurement criterion. Returns nullopt when no capable agent
/// is available (hard order with every business agent saturated, or
/// everyone saturated).
template <class Scorer>
std::optional<TeamPlan> form_team(const Institution& inst, int complexity, double work, const Coefficients& k,
                                  Scorer&& score) {
  const auto seed = pick_seed(inst, complexity, k);
  if (!seed) return std::nullopt;

  std::vector<int> members{*seed};
  TeamPlan plan = make_plan(inst, members, work, k);
  double current = score(plan) - k.coordination_overhead * 1.0;

  std::vector<int> candidates;
  for (int j : inst.graph.neighbors(*seed)) {
    if (available(inst.agents[static_cast<std::size_t>(j)], k.occupancy_horizon)) candidates.push_back(j);
  }
  while (!candidates.empty()) {
    double best_gain = 0.0;
    std::optional<std::size_t> best_idx;
    TeamPlan best_plan;
    double best_value = current;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      members.push_back(candidates[c]);
      TeamPlan trial = make_plan(inst, members, work, k);
      members.pop_back();
      const double value = score(trial) - k.coordination_overhead * static_cast<double>(members.size() + 1);
      const double gain = value - current;
      if (gain > best_gain) {
        best_gain = gain;
        best_idx = c;
        best_plan = std::move(trial);
        best_value = value;
      }
    }
    if (!best_idx) break;
    members.push_back(candidates[*best_idx]);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(*best_idx));
    plan = std::move(best_plan);
    current = best_value;
  }
  return plan;
}

}  // namespace svcmarket
