#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "svcmarket/core.hpp"
#include "svcmarket/demand.hpp"

namespace svcmarket {

using Json = nlohmann::ordered_json;

namespace detail {

/// Reads fields out of one JSON object and remembers which keys were used,
/// so leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string prefix, std::vector<Violation>& out)
      : obj_(obj), prefix_(std::move(prefix)), out_(out) {
    if (!obj_.is_object()) out_.push_back({path(""), obj_.dump(), "object"});
  }

  template <class T>
  void read(const char* key, T& dst) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) return;
    const auto& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_integer()) throw std::invalid_argument("integer");
        if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (v.is_number_unsigned()) {
            dst = v.get<std::uint64_t>();
          } else {
            if (v.get<std::int64_t>() < 0) throw std::invalid_argument("non-negative integer");
            dst = static_cast<std::uint64_t>(v.get<std::int64_t>());
          }
        } else {
          dst = v.get<T>();
        }
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("number");
        dst = v.get<double>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("string");
        dst = v.get<std::string>();
      } else {
        dst = v.get<T>();
      }
    } catch (const std::invalid_argument& e) {
      out_.push_back({path(key), v.dump(), e.what()});
    } catch (const nlohmann::json::exception&) {
      out_.push_back({path(key), v.dump(), "wrong type"});
    }
  }

  void skip(const char* key) { seen_.insert(key); }

  [[nodiscard]] const Json* child(const char* key) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) return nullptr;
    return &obj_.at(key);
  }

  [[nodiscard]] std::string path(const std::string& key) const {
    if (prefix_.empty()) return key;
    return key.empty() ? prefix_ : prefix_ + "." + key;
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key)) out_.push_back({path(key), "present", "unknown key"});
    }
  }

 private:
  const Json& obj_;
  std::string prefix_;
  std::vector<Violation>& out_;
  std::set<std::string> seen_;
};

inline std::optional<ProfileKind> parse_profile(std::string_view s) {
  for (auto k : {ProfileKind::Constant, ProfileKind::Sinusoidal, ProfileKind::Piecewise, ProfileKind::Empirical}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

}  // namespace detail

/// Parses a scenario document. Missing keys keep their defaults, unknown
/// keys and wrongly typed values are violations. Empirical profile CSV paths
/// resolve against `base_dir`. The result still needs validate_scenario.
inline ScenarioConfig scenario_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  ScenarioConfig c;
  std::vector<Violation> v;
  detail::ObjectReader root(j, "", v);

  root.read("n_institutions", c.n_institutions);

  if (const auto* a = root.child("agents_per_institution")) {
    detail::ObjectReader r(*a, "agents_per_institution", v);
    auto& comp = c.agents_per_institution;
    r.read("robots", comp.robots);
    r.read("business_agents", comp.business_agents);
    r.read("s0_robot", comp.robot_rate);
    r.read("s0_business", comp.business_rate);
    r.read("C_r", comp.robot_maintenance);
    r.read("B", comp.business_income);
    r.finish();
  }

  std::string topology;
  root.read("topology", topology);
  if (!topology.empty()) {
    if (auto k = parse_topology(topology)) {
      c.topology = *k;
    } else {
      v.push_back({"topology", topology, "isolated|global|star|ring|gnl|ws|nw|ba or GovA..GovH"});
    }
  }
  if (const auto* tp = root.child("topology_params")) {
    detail::ObjectReader r(*tp, "topology_params", v);
    r.read("K", c.topology_params.K);
    r.read("p", c.topology_params.p);
    if (tp->is_object() && tp->contains("L") && !tp->at("L").is_null()) {
      int links = 0;
      r.read("L", links);
      c.topology_params.links = links;
    } else {
      r.skip("L");
    }
    r.read("m0", c.topology_params.m0);
    r.read("m", c.topology_params.m);
    r.finish();
  }

  if (const auto* ap = root.child("arrival_profile")) {
    detail::ObjectReader r(*ap, "arrival_profile", v);
    auto& p = c.arrival_profile;
    std::string kind;
    r.read("kind", kind);
    if (!kind.empty()) {
      if (auto k = detail::parse_profile(kind)) {
        p.kind = *k;
      } else {
        v.push_back({"arrival_profile.kind", kind, "constant|sinusoidal|piecewise|empirical"});
      }
    }
    r.read("amplitude", p.amplitude);
    r.read("period", p.period);
    if (const auto* segs = r.child("segments")) {
      if (!segs->is_array()) {
        v.push_back({"arrival_profile.segments", segs->dump(), "array"});
      } else {
        for (const auto& s : *segs) {
          detail::ObjectReader sr(s, "arrival_profile.segments[]", v);
          RateSegment seg;
          sr.read("begin", seg.begin);
          sr.read("end", seg.end);
          sr.read("rate", seg.rate);
          sr.finish();
          p.segments.push_back(seg);
        }
      }
    }
    r.read("histogram", p.histogram);
    r.read("source", p.source);
    r.finish();
    if (p.kind == ProfileKind::Empirical && p.histogram.empty() && !p.source.empty()) {
      const std::filesystem::path src = base_dir.empty() ? std::filesystem::path(p.source) : base_dir / p.source;
      try {
        p.histogram = load_rate_histogram(src);
      } catch (const Error& e) {
        v.push_back({"arrival_profile.source", p.source, e.what()});
      }
    }
  }

  if (const auto* oa = root.child("order_attributes")) {
    detail::ObjectReader r(*oa, "order_attributes", v);
    auto& od = c.order_attributes;
    std::vector<double> props;
    r.read("type_proportions", props);
    if (!props.empty()) {
      if (props.size() > od.type_proportions.size()) {
        v.push_back({"order_attributes.type_proportions", std::to_string(props.size()) + " entries", "<= 8"});
      } else {
        od.type_proportions.fill(0.0);
        std::copy(props.begin(), props.end(), od.type_proportions.begin());
      }
    }
    r.read("p_composite", od.p_composite);
    r.read("composite_size_pmf", od.composite_size_pmf);
    std::vector<int> range;
    r.read("complexity_range", range);
    if (!range.empty()) {
      if (range.size() != 2) {
        v.push_back({"order_attributes.complexity_range", std::to_string(range.size()) + " entries", "[min,max]"});
      } else {
        od.complexity_min = range[0];
        od.complexity_max = range[1];
        od.complexity_pmf.clear();
      }
    }
    r.read("complexity_pmf", od.complexity_pmf);
    r.finish();
  }

  root.read("cycle_duration", c.cycle_duration);
  root.read("arrival_rate", c.arrival_rate);

  if (const auto* co = root.child("coefficients")) {
    detail::ObjectReader r(*co, "coefficients", v);
    auto& k = c.coefficients;
    r.read("lambda_T", k.time_penalty);
    r.read("lambda_C", k.cost_penalty);
    r.read("eta1", k.latency_penalty);
    r.read("eta2", k.imbalance_penalty);
    r.read("kappa_r", k.robot_occupancy_penalty);
    r.read("kappa_e", k.business_occupancy_penalty);
    r.read("phi", k.coordination_overhead);
    r.read("lambda_rho", k.congestion);
    r.read("lambda_c", k.team_size_delay);
    r.read("lambda_u", k.utility_speed_gain);
    r.read("lambda_w", k.network_gain);
    r.read("omega0", k.workload_base);
    r.read("omega1", k.workload_per_complexity);
    r.read("epsilon", k.epsilon);
    r.read("O_vr", k.income_conversion);
    r.read("G_vr", k.org_value_conversion);
    r.read("theta_r", k.robot_threshold);
    r.read("occupancy_horizon", k.occupancy_horizon);
    r.finish();
  }

  root.read("seed", c.seed);
  root.read("replications", c.replications);
  std::string method;
  root.read("measurement_method", method);
  if (!method.empty()) {
    if (auto m = parse_method(method)) {
      c.measurement_method = *m;
    } else {
      v.push_back({"measurement_method", method, "Usys|DM|QoS|SaL"});
    }
  }
  if (const auto* bw = root.child("baseline_weights")) {
    detail::ObjectReader r(*bw, "baseline_weights", v);
    r.read("dm", c.baseline_weights.dm);
    r.read("qos", c.baseline_weights.qos);
    r.finish();
  }
  std::string rule;
  root.read("reference_rule", rule);
  if (!rule.empty()) {
    if (auto rr = parse_reference_rule(rule)) {
      c.reference_rule = *rr;
    } else {
      v.push_back({"reference_rule", rule, "cold_start|running_mean"});
    }
  }
  root.finish();

  if (!v.empty()) throw ConfigError(std::move(v));
  return c;
}

/// Reads and parses a scenario file. Syntax errors are config errors.
inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"scenario", path.string(), "readable file"}});
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({{"scenario", path.string(), std::string("valid JSON: ") + e.what()}});
  }
  return scenario_from_json(j, path.parent_path());
}

/// Full resolved config; scenario_from_json reads it back unchanged.
inline Json scenario_to_json(const ScenarioConfig& c) {
  Json j;
  j["n_institutions"] = c.n_institutions;
  const auto& comp = c.agents_per_institution;
  j["agents_per_institution"] = {{"robots", comp.robots},         {"business_agents", comp.business_agents},
                                 {"s0_robot", comp.robot_rate},   {"s0_business", comp.business_rate},
                                 {"C_r", comp.robot_maintenance}, {"B", comp.business_income}};
  j["topology"] = std::string(to_string(c.topology));
  const auto& tp = c.topology_params;
  j["topology_params"] = {{"K", tp.K},
                          {"p", tp.p},
                          {"L", tp.links ? Json(*tp.links) : Json(nullptr)},
                          {"m0", tp.m0},
                          {"m", tp.m}};
  const auto& ap = c.arrival_profile;
  Json profile;
  profile["kind"] = std::string(to_string(ap.kind));
  profile["amplitude"] = ap.amplitude;
  profile["period"] = ap.period;
  Json segs = Json::array();
  for (const auto& s : ap.segments) segs.push_back({{"begin", s.begin}, {"end", s.end}, {"rate", s.rate}});
  profile["segments"] = segs;
  profile["histogram"] = ap.histogram;
  profile["source"] = ap.source;
  j["arrival_profile"] = profile;
  const auto& od = c.order_attributes;
  j["order_attributes"] = {{"type_proportions", od.type_proportions},
                           {"p_composite", od.p_composite},
                           {"composite_size_pmf", od.composite_size_pmf},
                           {"complexity_range", {od.complexity_min, od.complexity_max}},
                           {"complexity_pmf", od.complexity_pmf}};
  j["cycle_duration"] = c.cycle_duration;
  j["arrival_rate"] = c.arrival_rate;
  const auto& k = c.coefficients;
  j["coefficients"] = {{"lambda_T", k.time_penalty},
                       {"lambda_C", k.cost_penalty},
                       {"eta1", k.latency_penalty},
                       {"eta2", k.imbalance_penalty},
                       {"kappa_r", k.robot_occupancy_penalty},
                       {"kappa_e", k.business_occupancy_penalty},
                       {"phi", k.coordination_overhead},
                       {"lambda_rho", k.congestion},
                       {"lambda_c", k.team_size_delay},
                       {"lambda_u", k.utility_speed_gain},
                       {"lambda_w", k.network_gain},
                       {"omega0", k.workload_base},
                       {"omega1", k.workload_per_complexity},
                       {"epsilon", k.epsilon},
                       {"O_vr", k.income_conversion},
                       {"G_vr", k.org_value_conversion},
                       {"theta_r", k.robot_threshold},
                       {"occupancy_horizon", k.occupancy_horizon}};
  j["seed"] = c.seed;
  j["replications"] = c.replications;
  j["measurement_method"] = std::string(to_string(c.measurement_method));
  j["baseline_weights"] = {{"dm", c.baseline_weights.dm}, {"qos", c.baseline_weights.qos}};
  j["reference_rule"] = std::string(to_string(c.reference_rule));
  return j;
}

}  // namespace svcmarket
