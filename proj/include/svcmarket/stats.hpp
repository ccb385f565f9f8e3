#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "svcmarket/error.hpp"

namespace svcmarket::stats {

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Population standard deviation (divides by n).
inline double population_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline double population_variance(std::span<const double> xs) {
  const double s = population_std(xs);
  return s * s;
}

inline SummaryStats summarize(std::span<const double> xs) {
  SummaryStats s;
  if (xs.empty()) return s;
  s.count = xs.size();
  s.mean = mean(xs);
  s.std = population_std(xs);
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  // Guard the min <= mean <= max invariant against summation round-off.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

/// Gini coefficient of non-negative values, computed in O(n log n) from the
/// sorted form of sum_i sum_j |x_i - x_j| / (2 n^2 mean). All-zero input
/// yields 0.
inline double gini(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  for (double x : xs) {
    if (x < 0.0 || std::isnan(x)) {
      throw NegativeInput("gini: negative input " + std::to_string(x));
    }
  }
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total <= 0.0) return 0.0;
  // sum_{i<j} (x_j - x_i) = sum_j x_j (2j - n + 1) with 0-based j.
  double weighted = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    weighted += v[j] * (2.0 * static_cast<double>(j) - n + 1.0);
  }
  return weighted / (n * total);
}

/// (x - lo) / (hi - lo) clamped to [0, 1]; a degenerate range maps to 1.
inline double minmax_normalize(double x, double lo, double hi) {
  if (!(hi > lo)) return 1.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

struct Ranked {
  std::string id;
  double value = 0.0;
  int rank = 0;
};

/// Competition ranking, largest value first. Ties share the smaller rank.
/// Output is ordered by (rank, id).
inline std::vector<Ranked> rank_desc(std::vector<std::pair<std::string, double>> items) {
  std::vector<Ranked> out;
  out.reserve(items.size());
  for (auto& [id, v] : items) out.push_back({std::move(id), v, 0});
  std::sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i > 0 && out[i].value == out[i - 1].value) {
      out[i].rank = out[i - 1].rank;
    } else {
      out[i].rank = static_cast<int>(i) + 1;
    }
  }
  return out;
}

/// Lag-1 autocorrelation (biased estimator). Returns 0 for constant series.
inline double lag1_autocorrelation(std::span<const double> xs) {
  if (xs.size() < 3) return 0.0;
  const double m = mean(xs);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    den += (xs[i] - m) * (xs[i] - m);
    if (i + 1 < xs.size()) num += (xs[i] - m) * (xs[i + 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) return 0.0;
  const double mx = mean(xs.first(n));
  const double my = mean(ys.first(n));
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> differences(std::span<const double> xs) {
  std::vector<double> d;
  if (xs.size() < 2) return d;
  d.reserve(xs.size() - 1);
  for (std::size_t i = 1; i < xs.size(); ++i) d.push_back(xs[i] - xs[i - 1]);
  return d;
}

}  // namespace svcmarket::stats
