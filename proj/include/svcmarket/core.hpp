#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svcmarket/error.hpp"
#include "svcmarket/network.hpp"

namespace svcmarket {

inline constexpr int kMaxLetters = 8;

inline std::string format_number(double x);

// ---------------------------------------------------------------------------
// Orders

/// Canonical, sorted, duplicate-free set of basic type letters A..H.
class OrderType {
 public:
  OrderType() = default;

  /// Parses and canonicalizes ("BA" -> "AB", "AA" -> "A").
  static OrderType parse(std::string_view letters) {
    if (letters.empty()) throw InvalidOrderType("EmptyType: order type has no letters");
    std::string s;
    for (char c : letters) {
      if (c < 'A' || c > 'H') {
        throw InvalidOrderType(std::string("InvalidLetter: '") + c + "' not in A..H");
      }
      s.push_back(c);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    OrderType t;
    t.letters_ = std::move(s);
    return t;
  }

  [[nodiscard]] const std::string& letters() const noexcept { return letters_; }
  [[nodiscard]] std::size_t size() const noexcept { return letters_.size(); }
  [[nodiscard]] bool composite() const noexcept { return letters_.size() > 1; }
  [[nodiscard]] bool contains(char c) const noexcept {
    return letters_.find(c) != std::string::npos;
  }

  auto operator<=>(const OrderType&) const = default;

 private:
  std::string letters_;
};

inline OrderType canonicalize_order_type(std::string_view letters) {
  return OrderType::parse(letters);
}

enum class OrderState { Pending, Assigned, Executing, Completed, Expired };

inline std::string_view to_string(OrderState s) {
  switch (s) {
    case OrderState::Pending: return "Pending";
    case OrderState::Assigned: return "Assigned";
    case OrderState::Executing: return "Executing";
    case OrderState::Completed: return "Completed";
    case OrderState::Expired: return "Expired";
  }
  return "?";
}

/// Transitions only move forward; Completed and Expired are terminal.
inline bool can_transition(OrderState from, OrderState to) {
  if (from == OrderState::Completed || from == OrderState::Expired) return false;
  return static_cast<int>(to) > static_cast<int>(from);
}

/// The per-letter piece of an order. Each sub-order is routed to one
/// institution and executed by one team.
struct SubOrder {
  char letter = 'A';
  OrderState state = OrderState::Pending;
  std::optional<int> institution;
  std::optional<double> realized_time;
  std::optional<double> reference_time;
  std::optional<std::int64_t> start_tick;
  std::optional<std::int64_t> completion_tick;

  void advance(OrderState to) {
    if (!can_transition(state, to)) {
      throw Error(std::string("illegal sub-order transition ") + std::string(to_string(state)) +
                  " -> " + std::string(to_string(to)));
    }
    state = to;
  }
};

struct Order {
  std::uint64_t id = 0;
  OrderType otype;
  int complexity = 1;  // doubles as the order value O_dv
  std::int64_t arrival_tick = 0;
  std::optional<std::int64_t> deadline_tick;
  OrderState state = OrderState::Pending;
  std::vector<SubOrder> subs;
  std::optional<double> realized_time;  // max over sub-orders once complete

  [[nodiscard]] double value() const noexcept { return static_cast<double>(complexity); }

  void advance(OrderState to) {
    if (!can_transition(state, to)) {
      throw Error(std::string("illegal order transition ") + std::string(to_string(state)) +
                  " -> " + std::string(to_string(to)));
    }
    state = to;
  }

  /// Called after a sub-order completes. Marks the parent complete once every
  /// sub-order is, with realized time = max over sub-orders.
  bool refresh_completion() {
    if (state == OrderState::Completed) return false;
    double worst = 0.0;
    for (const auto& s : subs) {
      if (s.state != OrderState::Completed) return false;
      worst = std::max(worst, *s.realized_time);
    }
    state = OrderState::Completed;
    realized_time = worst;
    return true;
  }
};

/// Splits an order into one sub-order per letter.
inline std::vector<SubOrder> split_order(const OrderType& t) {
  std::vector<SubOrder> subs;
  subs.reserve(t.size());
  for (char c : t.letters()) {
    SubOrder s;
    s.letter = c;
    subs.push_back(s);
  }
  return subs;
}

// ---------------------------------------------------------------------------
// Agents and institutions

enum class AgentKind { Robot, BusinessAgent };

inline std::string_view to_string(AgentKind k) {
  return k == AgentKind::Robot ? "robot" : "business";
}

struct Agent {
  int id = 0;     // global id
  int local = 0;  // node index inside the institution graph
  AgentKind kind = AgentKind::Robot;
  int institution = 0;
  double baseline_rate = 1.0;  // s_a^0, workload units per tick
  double effective_rate = 1.0; // baseline after network and utility modulation
  int capability_threshold = 3;
  double maintenance_cost_per_cycle = 0.0;  // robots only
  double base_income = 0.0;                 // business agents only
  double committed_workload = 0.0;
  double assigned_workload = 0.0;  // all work ever committed, for tie-breaks
  double created_value = 0.0;  // sum of share * O_dv over completed work this cycle
  double utility = 0.0;        // last settled U_r / U_p

  [[nodiscard]] bool is_robot() const noexcept { return kind == AgentKind::Robot; }
};

struct Institution {
  int id = 0;
  char letter = 'A';
  std::vector<Agent> agents;
  Graph graph;
  double processed_value = 0.0;  // CV_G accumulator
  double cost = 0.0;             // C_G at last settlement

  [[nodiscard]] double mean_baseline_rate() const {
    if (agents.empty()) return 0.0;
    double s = 0.0;
    for (const auto& a : agents) s += a.baseline_rate;
    return s / static_cast<double>(agents.size());
  }
};

// ---------------------------------------------------------------------------
// Scenario

enum class MeasurementMethod { Usys, DM, QoS, SaL };

inline constexpr MeasurementMethod kAllMethods[] = {
    MeasurementMethod::Usys, MeasurementMethod::DM, MeasurementMethod::QoS, MeasurementMethod::SaL};

inline std::string_view to_string(MeasurementMethod m) {
  switch (m) {
    case MeasurementMethod::Usys: return "Usys";
    case MeasurementMethod::DM: return "DM";
    case MeasurementMethod::QoS: return "QoS";
    case MeasurementMethod::SaL: return "SaL";
  }
  return "?";
}

inline std::optional<MeasurementMethod> parse_method(std::string_view s) {
  for (auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  if (s == "D&M") return MeasurementMethod::DM;
  return std::nullopt;
}

enum class ProfileKind { Constant, Sinusoidal, Piecewise, Empirical };

inline std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Sinusoidal: return "sinusoidal";
    case ProfileKind::Piecewise: return "piecewise";
    case ProfileKind::Empirical: return "empirical";
  }
  return "?";
}

struct RateSegment {
  std::int64_t begin = 0;  // inclusive
  std::int64_t end = 0;    // exclusive
  double rate = 0.0;
};

/// lambda(t) over one cycle. Constant and Sinusoidal use `base`; the engine
/// fills `base` from the scenario arrival rate.
struct ArrivalProfile {
  ProfileKind kind = ProfileKind::Constant;
  double base = 5.0;
  double amplitude = 0.0;
  double period = 60.0;
  std::vector<RateSegment> segments;
  std::vector<double> histogram;  // per-tick rates for Empirical
  std::string source;             // CSV path for Empirical, informational
  std::int64_t horizon = 120;     // cycle length the profile is defined on
};

struct OrderAttributeDistributions {
  std::array<double, kMaxLetters> type_proportions{0.125, 0.125, 0.125, 0.125,
                                                   0.125, 0.125, 0.125, 0.125};
  int letters = kMaxLetters;             // active letters A..(A+letters-1)
  double p_composite = 0.2;
  std::vector<double> composite_size_pmf{0.7, 0.3};  // sizes 2, 3, ...
  int complexity_min = 1;
  int complexity_max = 3;
  std::vector<double> complexity_pmf{1.0 / 3, 1.0 / 3, 1.0 / 3};
};

/// Agent composition and per-kind economics of every institution.
struct Composition {
  int robots = 8;
  int business_agents = 4;
  double robot_rate = 2.0;         // s^0 robot
  double business_rate = 1.0;      // s^0 business agent
  double robot_maintenance = 0.5;  // C_r per cycle
  double business_income = 2.0;    // B per cycle

  [[nodiscard]] int total() const noexcept { return robots + business_agents; }
};

/// Model coefficients. JSON keys are given beside each field.
struct Coefficients {
  double time_penalty = 0.1;               // lambda_T
  double cost_penalty = 0.05;              // lambda_C
  double latency_penalty = 0.5;            // eta1
  double imbalance_penalty = 0.5;          // eta2
  double robot_occupancy_penalty = 1.0;    // kappa_r
  double business_occupancy_penalty = 1.0; // kappa_e
  double coordination_overhead = 0.2;      // phi
  double congestion = 0.2;                 // lambda_rho
  double team_size_delay = 0.1;            // lambda_c
  double utility_speed_gain = 0.5;         // lambda_u
  double network_gain = 0.25;              // lambda_w
  double workload_base = 1.0;              // omega0
  double workload_per_complexity = 2.0;    // omega1
  double epsilon = 1e-9;                   // epsilon
  double income_conversion = 0.3;          // O_vr
  double org_value_conversion = 1.0;       // G_vr
  int robot_threshold = 1;                 // theta_r
  int occupancy_horizon = 10;              // ticks of capacity behind occupancy
};

/// Component weights of the log-derived baseline measures: D&M is
/// (quality, usage, net benefit), QoS is (reverse latency, reliability,
/// reverse cost).
struct BaselineWeights {
  std::array<double, 3> dm{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::array<double, 3> qos{1.0 / 3, 1.0 / 3, 1.0 / 3};
};

/// Where T_e comes from. ColdStart keeps the no-history estimate
/// W / mean baseline rate for the whole run; RunningMean switches to the mean
/// realized time of earlier orders of the same complexity once one exists.
enum class ReferenceRule { ColdStart, RunningMean };

inline std::string_view to_string(ReferenceRule r) {
  return r == ReferenceRule::ColdStart ? "cold_start" : "running_mean";
}

inline std::optional<ReferenceRule> parse_reference_rule(std::string_view s) {
  if (s == "cold_start") return ReferenceRule::ColdStart;
  if (s == "running_mean") return ReferenceRule::RunningMean;
  return std::nullopt;
}

struct ScenarioConfig {
  int n_institutions = 8;
  Composition agents_per_institution;
  TopologyKind topology = TopologyKind::WattsStrogatz;
  TopologyParams topology_params;
  ArrivalProfile arrival_profile;
  OrderAttributeDistributions order_attributes;
  int cycle_duration = 120;
  double arrival_rate = 5.0;
  Coefficients coefficients;
  std::uint64_t seed = 1;
  int replications = 1;
  MeasurementMethod measurement_method = MeasurementMethod::Usys;
  BaselineWeights baseline_weights;
  ReferenceRule reference_rule = ReferenceRule::ColdStart;
};

/// A ScenarioConfig that passed validation. Only validate_scenario makes one.
class ValidatedScenario {
 public:
  [[nodiscard]] const ScenarioConfig& config() const noexcept { return cfg_; }
  const ScenarioConfig* operator->() const noexcept { return &cfg_; }

  /// Copy with a different topology or method; both are always valid.
  [[nodiscard]] ValidatedScenario with_topology(TopologyKind k) const {
    ValidatedScenario v = *this;
    v.cfg_.topology = k;
    return v;
  }
  [[nodiscard]] ValidatedScenario with_method(MeasurementMethod m) const {
    ValidatedScenario v = *this;
    v.cfg_.measurement_method = m;
    return v;
  }
  [[nodiscard]] ValidatedScenario with_seed(std::uint64_t seed) const {
    ValidatedScenario v = *this;
    v.cfg_.seed = seed;
    return v;
  }

 private:
  friend ValidatedScenario validate_scenario(ScenarioConfig raw);
  explicit ValidatedScenario(ScenarioConfig c) : cfg_(std::move(c)) {}
  ScenarioConfig cfg_;
};

namespace detail {

inline std::string range_str(double lo, double hi) {
  return "[" + format_number(lo) + "," + format_number(hi) + "]";
}

inline void check_pmf(std::vector<Violation>& out, const std::string& field,
                      std::span<const double> pmf) {
  double sum = 0.0;
  for (double x : pmf) {
    if (!(x >= 0.0)) {
      out.push_back({field, format_number(x), "entries >= 0"});
      return;
    }
    sum += x;
  }
  if (pmf.empty() || std::abs(sum - 1.0) > 1e-12) {
    out.push_back({field, "sum=" + format_number(sum), "sum to 1 within 1e-12"});
  }
}

}  // namespace detail

/// Fills defaults and checks every range. Throws ConfigError listing all
/// violations.
inline ValidatedScenario validate_scenario(ScenarioConfig raw) {
  std::vector<Violation> v;
  auto& c = raw;
  const auto num = [](double x) { return format_number(x); };

  if (c.n_institutions < 1 || c.n_institutions > kMaxLetters) {
    v.push_back({"n_institutions", num(c.n_institutions), "[1,8]"});
  }
  if (!(c.arrival_rate >= 0.5 && c.arrival_rate <= 10.0)) {
    v.push_back({"arrival_rate", num(c.arrival_rate), "[0.5,10]"});
  }
  if (c.cycle_duration < 60 || c.cycle_duration > 240) {
    v.push_back({"cycle_duration", num(c.cycle_duration), "[60,240]"});
  }
  if (c.replications < 1) v.push_back({"replications", num(c.replications), ">= 1"});

  auto& comp = c.agents_per_institution;
  if (comp.robots < 0) v.push_back({"agents_per_institution.robots", num(comp.robots), ">= 0"});
  if (comp.business_agents < 0) {
    v.push_back({"agents_per_institution.business_agents", num(comp.business_agents), ">= 0"});
  }
  if (comp.total() < 1) v.push_back({"agents_per_institution", num(comp.total()), "total >= 1"});
  if (!(comp.robot_rate > 0.0)) v.push_back({"agents_per_institution.s0_robot", num(comp.robot_rate), "> 0"});
  if (!(comp.business_rate > 0.0)) {
    v.push_back({"agents_per_institution.s0_business", num(comp.business_rate), "> 0"});
  }
  if (!(comp.robot_maintenance >= 0.0)) v.push_back({"agents_per_institution.C_r", num(comp.robot_maintenance), ">= 0"});
  if (!(comp.business_income >= 0.0)) v.push_back({"agents_per_institution.B", num(comp.business_income), ">= 0"});

  // Complexity range and pmf.
  auto& od = c.order_attributes;
  if (od.complexity_min < 1 || od.complexity_max > 3 || od.complexity_min > od.complexity_max) {
    v.push_back({"complexity_range",
                 "[" + num(od.complexity_min) + "," + num(od.complexity_max) + "]",
                 "1 <= min <= max <= 3"});
  } else {
    const auto width = static_cast<std::size_t>(od.complexity_max - od.complexity_min + 1);
    if (od.complexity_pmf.size() != width) {
      // Unset or stale pmf: uniform over the range.
      od.complexity_pmf.assign(width, 1.0 / static_cast<double>(width));
    }
    detail::check_pmf(v, "order_attributes.complexity_pmf", od.complexity_pmf);
  }
  od.letters = std::clamp(c.n_institutions, 1, kMaxLetters);
  {
    std::span<const double> props(od.type_proportions.data(), static_cast<std::size_t>(od.letters));
    bool uniform_default = true;
    for (double x : od.type_proportions) uniform_default = uniform_default && x == 0.125;
    if (uniform_default && od.letters != kMaxLetters) {
      // Default proportions follow the active letter count.
      od.type_proportions.fill(0.0);
      for (int i = 0; i < od.letters; ++i) od.type_proportions[static_cast<std::size_t>(i)] = 1.0 / od.letters;
    } else {
      for (int i = od.letters; i < kMaxLetters; ++i) {
        if (od.type_proportions[static_cast<std::size_t>(i)] != 0.0) {
          v.push_back({"order_attributes.type_proportions", "letter " + std::string(1, static_cast<char>('A' + i)),
                       "zero for letters without an institution"});
        }
      }
      detail::check_pmf(v, "order_attributes.type_proportions", props);
    }
  }
  if (!(od.p_composite >= 0.0 && od.p_composite <= 1.0)) {
    v.push_back({"order_attributes.p_composite", num(od.p_composite), "[0,1]"});
  }
  detail::check_pmf(v, "order_attributes.composite_size_pmf", od.composite_size_pmf);

  // Arrival profile.
  auto& ap = c.arrival_profile;
  ap.horizon = c.cycle_duration;
  switch (ap.kind) {
    case ProfileKind::Constant:
      ap.base = c.arrival_rate;
      break;
    case ProfileKind::Sinusoidal:
      ap.base = c.arrival_rate;
      if (!(ap.amplitude >= 0.0 && ap.amplitude <= ap.base)) {
        v.push_back({"arrival_profile.amplitude", num(ap.amplitude), detail::range_str(0, ap.base)});
      }
      if (!(ap.period > 0.0)) v.push_back({"arrival_profile.period", num(ap.period), "> 0"});
      break;
    case ProfileKind::Piecewise: {
      if (ap.segments.empty()) {
        v.push_back({"arrival_profile.segments", "missing", "MissingField"});
        break;
      }
      auto segs = ap.segments;
      std::sort(segs.begin(), segs.end(),
                [](const RateSegment& a, const RateSegment& b) { return a.begin < b.begin; });
      std::int64_t cursor = 0;
      for (const auto& s : segs) {
        if (s.begin != cursor || s.end <= s.begin) {
          v.push_back({"arrival_profile.segments", "[" + num(static_cast<double>(s.begin)) + "," +
                                                       num(static_cast<double>(s.end)) + ")",
                       "contiguous cover of [0,cycle_duration)"});
          break;
        }
        if (!(s.rate >= 0.0)) v.push_back({"arrival_profile.segments.rate", num(s.rate), ">= 0"});
        cursor = s.end;
      }
      if (cursor < c.cycle_duration) {
        v.push_back({"arrival_profile.segments", "ends at " + num(static_cast<double>(cursor)),
                     "cover [0," + num(c.cycle_duration) + ")"});
      }
      ap.segments = std::move(segs);
      break;
    }
    case ProfileKind::Empirical:
      if (ap.histogram.size() < static_cast<std::size_t>(c.cycle_duration)) {
        v.push_back({"arrival_profile.histogram", num(static_cast<double>(ap.histogram.size())) + " bins",
                     ">= cycle_duration bins"});
      }
      for (double r : ap.histogram) {
        if (!(r >= 0.0)) {
          v.push_back({"arrival_profile.histogram", num(r), ">= 0"});
          break;
        }
      }
      break;
  }

  // Coefficients: non-negative, epsilon > 0.
  const auto& k = c.coefficients;
  const std::pair<const char*, double> nonneg[] = {
      {"lambda_T", k.time_penalty},       {"lambda_C", k.cost_penalty},
      {"eta1", k.latency_penalty},        {"eta2", k.imbalance_penalty},
      {"kappa_r", k.robot_occupancy_penalty}, {"kappa_e", k.business_occupancy_penalty},
      {"phi", k.coordination_overhead},   {"lambda_rho", k.congestion},
      {"lambda_c", k.team_size_delay},    {"lambda_u", k.utility_speed_gain},
      {"lambda_w", k.network_gain},       {"omega0", k.workload_base},
      {"omega1", k.workload_per_complexity}, {"O_vr", k.income_conversion},
      {"G_vr", k.org_value_conversion},
  };
  for (const auto& [name, value] : nonneg) {
    if (!(value >= 0.0)) v.push_back({std::string("coefficients.") + name, num(value), ">= 0"});
  }
  if (!(k.epsilon > 0.0)) v.push_back({"coefficients.epsilon", num(k.epsilon), "> 0"});
  if (!(k.workload_base + k.workload_per_complexity > 0.0)) {
    v.push_back({"coefficients.omega0+omega1", num(k.workload_base + k.workload_per_complexity), "> 0"});
  }
  // Robots stay below the hardest complexity the model knows about.
  if (k.robot_threshold < 0 || k.robot_threshold >= 3) {
    v.push_back({"coefficients.theta_r", num(k.robot_threshold), "[0,2]"});
  }
  for (const auto& [name, w] : {std::pair{"baseline_weights.dm", c.baseline_weights.dm},
                                std::pair{"baseline_weights.qos", c.baseline_weights.qos}}) {
    if (!(w[0] >= 0 && w[1] >= 0 && w[2] >= 0 && w[0] + w[1] + w[2] > 0)) {
      v.push_back({name, num(w[0]) + "," + num(w[1]) + "," + num(w[2]), "non-negative, positive sum"});
    }
  }
  if (k.occupancy_horizon < 1) v.push_back({"coefficients.occupancy_horizon", num(k.occupancy_horizon), ">= 1"});

  try {
    check_topology_params(c.topology, comp.total(), c.topology_params);
  } catch (const BadParams& e) {
    v.push_back({"topology", std::string(to_string(c.topology)), e.what()});
  }

  if (!v.empty()) throw ConfigError(std::move(v));
  return ValidatedScenario(std::move(raw));
}

// ---------------------------------------------------------------------------
// Clock and event log

struct SimClock {
  std::int64_t tick = 0;
  double tick_length = 1.0;  // dt

  void advance() { ++tick; }
};

enum class EventKind { Arrival, Assignment, TeamFormed, Completion, Expiry, Settlement };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Arrival: return "Arrival";
    case EventKind::Assignment: return "Assignment";
    case EventKind::TeamFormed: return "TeamFormed";
    case EventKind::Completion: return "Completion";
    case EventKind::Expiry: return "Expiry";
    case EventKind::Settlement: return "Settlement";
  }
  return "?";
}

struct ArrivalPayload {
  std::uint64_t order = 0;
  std::string otype;
  int complexity = 1;
};

struct AssignmentPayload {
  std::uint64_t order = 0;
  int sub = 0;
  char letter = 'A';
  int institution = 0;
  double estimated_utility = 0.0;
  double robot_occupancy = 0.0;
  double business_occupancy = 0.0;
  double score = 0.0;
  int candidates = 0;
};

/// Terms of the completion-time model, logged for offline re-computation.
struct ExecutionTerms {
  std::vector<int> members;  // global agent ids
  std::vector<double> shares;
  std::vector<double> rates;
  double workload = 0.0;
  double sum_rate = 0.0;
  double mean_occupancy = 0.0;
  int team_size = 0;
  double realized_time = 0.0;
  double reference_time = 0.0;
};

struct TeamFormedPayload {
  std::uint64_t order = 0;
  int sub = 0;
  char letter = 'A';
  int institution = 0;
  ExecutionTerms terms;
  std::int64_t completion_tick = 0;
  int business_members = 0;
};

struct CompletionPayload {
  std::uint64_t order = 0;
  int sub = 0;
  char letter = 'A';
  int institution = 0;
  int complexity = 1;
  ExecutionTerms terms;
  bool parent_completed = false;
  double parent_realized_time = 0.0;
};

struct ExpiryPayload {
  std::uint64_t order = 0;
  int sub = 0;
  char letter = 'A';
  std::string state;  // state the sub-order was in when the run ended
};

struct SettlementPayload {
  int institution = -1;  // -1 = system level
  double created_value = 0.0;
  double cost = 0.0;
  double utility = 0.0;
};

using EventPayload = std::variant<ArrivalPayload, AssignmentPayload, TeamFormedPayload,
                                  CompletionPayload, ExpiryPayload, SettlementPayload>;

struct EventRecord {
  std::int64_t tick = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Arrival;
  EventPayload payload;
};

/// Append-only event log ordered by (tick, seq).
class EventLog {
 public:
  const EventRecord& append(std::int64_t tick, EventKind kind, EventPayload payload) {
    if (!records_.empty() && tick < records_.back().tick) {
      throw Error("event log must be appended in tick order");
    }
    records_.push_back(EventRecord{tick, next_seq_++, kind, std::move(payload)});
    return records_.back();
  }

  [[nodiscard]] const std::vector<EventRecord>& records() const noexcept { return records_; }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<EventRecord> records_;
  std::uint64_t next_seq_ = 0;
};

/// Shortest round-trip decimal representation; deterministic across runs.
inline std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace svcmarket
