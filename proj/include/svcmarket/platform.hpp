#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "svcmarket/core.hpp"
#include "svcmarket/execution.hpp"
#include "svcmarket/measurement.hpp"
#include "svcmarket/stats.hpp"

namespace svcmarket {

struct AssignmentDecision {
  std::uint64_t order = 0;
  int sub = 0;
  int institution = 0;
  double estimated_utility = 0.0;
  double robot_occupancy = 0.0;
  double business_occupancy = 0.0;
  double score = 0.0;
  int candidates = 0;
};

/// Mean robot and business-agent occupancy of an institution.
struct InstitutionOccupancy {
  double robot = 0.0;
  double business = 0.0;
};

inline InstitutionOccupancy institution_occupancy(const Institution& inst, int horizon) {
  InstitutionOccupancy o;
  int robots = 0, business = 0;
  for (const auto& a : inst.agents) {
    const double rho = occupancy(a, horizon);
    if (a.is_robot()) {
      o.robot += rho;
      ++robots;
    } else {
      o.business += rho;
      ++business;
    }
  }
  if (robots > 0) o.robot /= robots;
  if (business > 0) o.business /= business;
  return o;
}

/// Institution-level prediction for one sub-order: time is the workload over
/// the spare effective rate of every agent below saturation, cost is the
/// business agents' income share of that capacity.
inline std::optional<OrderEstimate> predict_order(char letter, int complexity, const Institution& inst,
                                                  const Coefficients& k, double reference_time) {
  if (inst.letter != letter) {
    throw TypeMismatch(std::string("institution ") + inst.letter + " cannot serve type " + letter);
  }
  const bool hard = complexity > k.robot_threshold;
  double spare = 0.0, spare_business = 0.0;
  bool capable = false;
  for (const auto& a : inst.agents) {
    const double rho = occupancy(a, k.occupancy_horizon);
    if (rho >= 1.0) continue;
    const double r = a.effective_rate * (1.0 - rho);
    spare += r;
    if (!a.is_robot()) {
      spare_business += r;
      capable = true;
    } else if (!hard) {
      capable = true;
    }
  }
  if (!capable || !(spare > 0.0)) return std::nullopt;
  const double value = static_cast<double>(complexity);
  const double w = workload(value, k.workload_base, k.workload_per_complexity);
  return OrderEstimate{.value = value,
                       .reference_time = reference_time,
                       .predicted_time = w / spare,
                       .predicted_cost = value * k.income_conversion * spare_business / spare};
}

/// u-hat of the institution for the sub-order under the active criterion;
/// -inf when nobody able to take it has spare capacity.
inline double estimate_order_utility(char letter, int complexity, const Institution& inst, MeasurementMethod m,
                                     const Coefficients& k, double reference_time,
                                     const BaselineWeights& w = {}) {
  const auto est = predict_order(letter, complexity, inst, k, reference_time);
  if (!est) return -std::numeric_limits<double>::infinity();
  return order_score(m, *est, w);
}

/// One feasible institution as the assignment step sees it.
struct Candidate {
  int institution = 0;
  char letter = 'A';
  double estimated_utility = 0.0;
  double robot_occupancy = 0.0;
  double business_occupancy = 0.0;
};

/// Index of argmax of u-hat - kappa_r rho_r - kappa_e rho_e. Infeasible
/// candidates (u-hat = -inf) never win. Ties go to the lowest letter.
inline std::optional<std::size_t> select_institution(std::span<const Candidate> cands, double kappa_r,
                                                     double kappa_e) {
  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i];
    if (!std::isfinite(c.estimated_utility)) continue;
    const double s = c.estimated_utility - kappa_r * c.robot_occupancy - kappa_e * c.business_occupancy;
    if (!best || s > best_score || (s == best_score && c.letter < cands[*best].letter)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

/// Routes one sub-order to the institution maximizing the penalized
/// estimate among those serving its letter. nullopt means no institution
/// can take it now and the sub-order waits.
inline std::optional<AssignmentDecision> assign_order(std::uint64_t order, int sub, char letter, int complexity,
                                                      std::span<const Institution> insts, MeasurementMethod m,
                                                      const Coefficients& k, std::span<const double> reference_times,
                                                      const BaselineWeights& w = {}) {
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const auto& inst = insts[i];
    if (inst.letter != letter) continue;
    const auto occ = institution_occupancy(inst, k.occupancy_horizon);
    cands.push_back({inst.id, inst.letter,
                     estimate_order_utility(letter, complexity, inst, m, k, reference_times[i], w), occ.robot,
                     occ.business});
  }
  const auto pick = select_institution(cands, k.robot_occupancy_penalty, k.business_occupancy_penalty);
  if (!pick) return std::nullopt;
  const auto& c = cands[*pick];
  return AssignmentDecision{
      .order = order,
      .sub = sub,
      .institution = c.institution,
      .estimated_utility = c.estimated_utility,
      .robot_occupancy = c.robot_occupancy,
      .business_occupancy = c.business_occupancy,
      .score = c.estimated_utility - k.robot_occupancy_penalty * c.robot_occupancy -
               k.business_occupancy_penalty * c.business_occupancy,
      .candidates = static_cast<int>(cands.size()),
  };
}

/// Omega: population variance of institution occupancy.
inline double load_imbalance(std::span<const double> institution_occupancies) {
  if (institution_occupancies.empty()) return 0.0;
  return stats::population_variance(institution_occupancies);
}

/// D_op = R - eta1 * mean time - eta2 * Omega.
inline double platform_objective(double revenue, double mean_time, double imbalance, double eta1, double eta2) {
  return revenue - eta1 * mean_time - eta2 * imbalance;
}

}  // namespace svcmarket
