#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "svcmarket/core.hpp"

namespace svcmarket {

/// lambda(t) for t in [0, horizon]. Throws OutOfCycle outside that range.
inline double eval_rate(const ArrivalProfile& p, std::int64_t t) {
  if (t < 0 || t > p.horizon) {
    throw OutOfCycle("tick " + std::to_string(t) + " outside [0," + std::to_string(p.horizon) + "]");
  }
  switch (p.kind) {
    case ProfileKind::Constant:
      return std::max(0.0, p.base);
    case ProfileKind::Sinusoidal:
      return std::max(0.0, p.base + p.amplitude * std::sin(2.0 * std::numbers::pi *
                                                           static_cast<double>(t) / p.period));
    case ProfileKind::Piecewise:
      for (const auto& s : p.segments) {
        if (t >= s.begin && t < s.end) return s.rate;
      }
      // t == horizon falls past the last half-open segment.
      return p.segments.empty() ? 0.0 : p.segments.back().rate;
    case ProfileKind::Empirical:
      if (p.histogram.empty()) return 0.0;
      return p.histogram[std::min(static_cast<std::size_t>(t), p.histogram.size() - 1)];
  }
  return 0.0;
}

/// Expected arrivals over [0, horizon) with window dt = 1.
inline double expected_arrivals(const ArrivalProfile& p) {
  double total = 0.0;
  for (std::int64_t t = 0; t < p.horizon; ++t) total += eval_rate(p, t);
  return total;
}

/// N ~ Poisson(lambda(t) * dt).
template <class Urbg>
long sample_arrival_count(const ArrivalProfile& p, std::int64_t t, double dt, Urbg& rng) {
  const double mean = eval_rate(p, t) * dt;
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<long>(mean)(rng);
}

/// Draws type and complexity of one order arriving at tick t.
template <class Urbg>
Order synthesize_order(const OrderAttributeDistributions& d, std::int64_t t, std::uint64_t id,
                       Urbg& rng) {
  const int letters = std::clamp(d.letters, 1, kMaxLetters);
  std::string chosen;
  std::bernoulli_distribution composite(letters >= 2 ? d.p_composite : 0.0);
  if (composite(rng)) {
    std::discrete_distribution<int> size_pick(d.composite_size_pmf.begin(), d.composite_size_pmf.end());
    const int k = std::min(2 + size_pick(rng), letters);
    std::vector<char> pool;
    for (int i = 0; i < letters; ++i) pool.push_back(static_cast<char>('A' + i));
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, letters - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
      chosen.push_back(pool[static_cast<std::size_t>(i)]);
    }
  } else {
    std::discrete_distribution<int> letter_pick(d.type_proportions.begin(),
                                                d.type_proportions.begin() + letters);
    chosen.push_back(static_cast<char>('A' + letter_pick(rng)));
  }
  std::discrete_distribution<int> cx(d.complexity_pmf.begin(), d.complexity_pmf.end());

  Order o;
  o.id = id;
  o.otype = OrderType::parse(chosen);
  o.complexity = d.complexity_min + cx(rng);
  o.arrival_tick = t;
  o.state = OrderState::Pending;
  o.subs = split_order(o.otype);
  return o;
}

/// Quality, time and cost of one completed order as seen by the demand side.
struct DemandRecord {
  double quality = 0.0;
  double time = 0.0;
  double cost = 0.0;
};

/// Order value discounted by lateness against its reference time.
inline double order_quality(double value, double reference_time, double realized_time) {
  if (!(realized_time > 0.0)) return value;
  return value * std::min(1.0, reference_time / realized_time);
}

/// Mean of q - lambda_T T - lambda_C C; an empty window scores 0.
inline double demand_utility(std::span<const DemandRecord> records, double lambda_t, double lambda_c) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.quality - lambda_t * r.time - lambda_c * r.cost;
  return sum / static_cast<double>(records.size());
}

/// Reads a two-column "tick,rate" CSV into a per-tick histogram. A header
/// row is skipped if its first field is not numeric. Missing ticks are 0.
inline std::vector<double> load_rate_histogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open arrival profile CSV: " + path.string());
  std::vector<double> hist;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string tick_s, rate_s;
    if (!std::getline(ss, tick_s, ',') || !std::getline(ss, rate_s)) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected tick,rate");
    }
    long tick = 0;
    double rate = 0.0;
    try {
      std::size_t used = 0;
      tick = std::stol(tick_s, &used);
      rate = std::stod(rate_s);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw Error(path.string() + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (tick < 0) throw Error(path.string() + ":" + std::to_string(lineno) + ": negative tick");
    if (hist.size() <= static_cast<std::size_t>(tick)) hist.resize(static_cast<std::size_t>(tick) + 1, 0.0);
    hist[static_cast<std::size_t>(tick)] = rate;
  }
  return hist;
}

}  // namespace svcmarket
