#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svcmarket/error.hpp"
#include "svcmarket/stats.hpp"

namespace svcmarket {

enum class TopologyKind {
  Isolated,
  GloballyCoupled,
  Star,
  Ring,
  RandomGNL,
  WattsStrogatz,
  NewmanWatts,
  BarabasiAlbert,
};

inline constexpr TopologyKind kAllTopologies[] = {
    TopologyKind::Isolated,      TopologyKind::GloballyCoupled, TopologyKind::Star,
    TopologyKind::Ring,          TopologyKind::RandomGNL,       TopologyKind::WattsStrogatz,
    TopologyKind::NewmanWatts,   TopologyKind::BarabasiAlbert,
};

inline std::string_view to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::Isolated: return "isolated";
    case TopologyKind::GloballyCoupled: return "global";
    case TopologyKind::Star: return "star";
    case TopologyKind::Ring: return "ring";
    case TopologyKind::RandomGNL: return "gnl";
    case TopologyKind::WattsStrogatz: return "ws";
    case TopologyKind::NewmanWatts: return "nw";
    case TopologyKind::BarabasiAlbert: return "ba";
  }
  return "?";
}

/// Scenario preset label (GovA..GovH) of a topology.
inline std::string preset_name(TopologyKind k) {
  return std::string("Gov") + static_cast<char>('A' + static_cast<int>(k));
}

/// Accepts the short names above, long names, and GovA..GovH.
inline std::optional<TopologyKind> parse_topology(std::string_view s) {
  if (s.size() == 4 && s.substr(0, 3) == "Gov" && s[3] >= 'A' && s[3] <= 'H') {
    return static_cast<TopologyKind>(s[3] - 'A');
  }
  struct Alias {
    std::string_view name;
    TopologyKind kind;
  };
  static constexpr Alias aliases[] = {
      {"isolated", TopologyKind::Isolated},
      {"global", TopologyKind::GloballyCoupled},
      {"globally-coupled", TopologyKind::GloballyCoupled},
      {"complete", TopologyKind::GloballyCoupled},
      {"star", TopologyKind::Star},
      {"ring", TopologyKind::Ring},
      {"gnl", TopologyKind::RandomGNL},
      {"random", TopologyKind::RandomGNL},
      {"ws", TopologyKind::WattsStrogatz},
      {"watts-strogatz", TopologyKind::WattsStrogatz},
      {"nw", TopologyKind::NewmanWatts},
      {"newman-watts", TopologyKind::NewmanWatts},
      {"ba", TopologyKind::BarabasiAlbert},
      {"barabasi-albert", TopologyKind::BarabasiAlbert},
  };
  for (const auto& a : aliases) {
    if (a.name == s) return a.kind;
  }
  return std::nullopt;
}

/// Generator parameters. Unused fields are ignored by kinds that do not need
/// them. `links` unset means round(n(n-1)/8).
struct TopologyParams {
  int K = 4;
  double p = 0.1;
  std::optional<int> links;
  int m0 = 2;
  int m = 2;

  bool operator==(const TopologyParams&) const = default;
};

inline int default_link_count(int n) {
  return static_cast<int>(std::lround(static_cast<double>(n) * (n - 1) / 8.0));
}

/// Undirected simple graph over nodes 0..n-1.
class Graph {
 public:
  Graph() = default;
  Graph(int n, TopologyKind kind, TopologyParams params)
      : adj_(static_cast<std::size_t>(n)), kind_(kind), params_(params) {}

  [[nodiscard]] int size() const noexcept { return static_cast<int>(adj_.size()); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edges_; }
  [[nodiscard]] TopologyKind kind() const noexcept { return kind_; }
  [[nodiscard]] const TopologyParams& params() const noexcept { return params_; }

  // Generator bookkeeping: WS rewirings performed, NW shortcuts added,
  // edges in the BA seed graph.
  std::size_t rewired = 0;
  std::size_t added = 0;
  std::size_t seed_edges = 0;

  /// Inserts {i, j}. Self-loops and duplicates are rejected (returns false).
  bool add_edge(int i, int j) {
    check(i);
    check(j);
    if (i == j || has_edge(i, j)) return false;
    insert_sorted(adj_[i], j);
    insert_sorted(adj_[j], i);
    ++edges_;
    return true;
  }

  bool remove_edge(int i, int j) {
    check(i);
    check(j);
    if (!has_edge(i, j)) return false;
    erase_sorted(adj_[i], j);
    erase_sorted(adj_[j], i);
    --edges_;
    return true;
  }

  [[nodiscard]] bool has_edge(int i, int j) const {
    const auto& a = adj_.at(static_cast<std::size_t>(i));
    return std::binary_search(a.begin(), a.end(), j);
  }

  [[nodiscard]] const std::vector<int>& neighbors(int i) const {
    check(i);
    return adj_[static_cast<std::size_t>(i)];
  }

  [[nodiscard]] int degree(int i) const {
    check(i);
    return static_cast<int>(adj_[static_cast<std::size_t>(i)].size());
  }

  /// Edges as (i, j) with i < j, lexicographically sorted.
  [[nodiscard]] std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_);
    for (int i = 0; i < size(); ++i) {
      for (int j : adj_[static_cast<std::size_t>(i)]) {
        if (i < j) out.emplace_back(i, j);
      }
    }
    return out;
  }

 private:
  void check(int i) const {
    if (i < 0 || i >= size()) {
      throw NodeOutOfRange("node " + std::to_string(i) + " out of range [0," +
                           std::to_string(size()) + ")");
    }
  }
  static void insert_sorted(std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }
  static void erase_sorted(std::vector<int>& v, int x) {
    v.erase(std::lower_bound(v.begin(), v.end(), x));
  }

  std::vector<std::vector<int>> adj_;
  std::size_t edges_ = 0;
  TopologyKind kind_ = TopologyKind::Isolated;
  TopologyParams params_;
};

inline int degree(const Graph& g, int i) { return g.degree(i); }

namespace detail {

inline void ring_lattice(Graph& g, int half_k) {
  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= half_k; ++d) g.add_edge(i, (i + d) % n);
  }
}

template <class Urbg>
int uniform_node(int n, Urbg& rng) {
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline constexpr int kMaxRedraws = 64;

}  // namespace detail

/// Checks generator parameters for `kind` on `n` nodes; throws BadParams.
inline void check_topology_params(TopologyKind kind, int n, const TopologyParams& p) {
  const auto bad = [&](const std::string& why) {
    throw BadParams(std::string(to_string(kind)) + ": " + why);
  };
  if (n < 1) bad("n must be >= 1");
  switch (kind) {
    case TopologyKind::RandomGNL: {
      const long long max_links = static_cast<long long>(n) * (n - 1) / 2;
      const int l = p.links.value_or(default_link_count(n));
      if (l < 0 || l > max_links) {
        bad("L=" + std::to_string(l) + " outside [0," + std::to_string(max_links) + "]");
      }
      break;
    }
    case TopologyKind::WattsStrogatz:
    case TopologyKind::NewmanWatts:
      if (p.K < 0 || p.K % 2 != 0) bad("K must be even and non-negative, got " + std::to_string(p.K));
      if (p.K >= n) bad("K must be < n");
      if (!(p.p >= 0.0 && p.p <= 1.0)) bad("p must lie in [0,1]");
      break;
    case TopologyKind::BarabasiAlbert:
      if (p.m0 < 1) bad("m0 must be >= 1");
      if (p.m < 1 || p.m > p.m0) bad("m must satisfy 1 <= m <= m0");
      if (n < p.m0) bad("n must be >= m0");
      break;
    default:
      break;
  }
}

/// Builds one collaboration topology. Node 0 is the star hub and the first
/// BA seed node.
template <class Urbg>
Graph generate_topology(TopologyKind kind, int n, const TopologyParams& params, Urbg& rng) {
  check_topology_params(kind, n, params);
  Graph g(n, kind, params);
  switch (kind) {
    case TopologyKind::Isolated:
      break;
    case TopologyKind::GloballyCoupled:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
      break;
    case TopologyKind::Star:
      for (int j = 1; j < n; ++j) g.add_edge(0, j);
      break;
    case TopologyKind::Ring:
      if (n >= 2) detail::ring_lattice(g, 1);
      break;
    case TopologyKind::RandomGNL: {
      const int links = params.links.value_or(default_link_count(n));
      std::vector<std::pair<int, int>> pairs;
      pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      // Partial Fisher-Yates: the first `links` slots are a uniform sample
      // without replacement.
      for (int k = 0; k < links; ++k) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), pairs.size() - 1);
        std::swap(pairs[static_cast<std::size_t>(k)], pairs[pick(rng)]);
        g.add_edge(pairs[static_cast<std::size_t>(k)].first, pairs[static_cast<std::size_t>(k)].second);
      }
      break;
    }
    case TopologyKind::WattsStrogatz: {
      detail::ring_lattice(g, params.K / 2);
      std::bernoulli_distribution coin(params.p);
      // Each lattice edge (i, i+d) is visited once; the far endpoint moves.
      for (int d = 1; d <= params.K / 2; ++d) {
        for (int i = 0; i < n; ++i) {
          const int j = (i + d) % n;
          if (!coin(rng) || !g.has_edge(i, j)) continue;
          for (int attempt = 0; attempt < detail::kMaxRedraws; ++attempt) {
            const int target = detail::uniform_node(n, rng);
            if (target == i || g.has_edge(i, target)) continue;
            g.remove_edge(i, j);
            g.add_edge(i, target);
            ++g.rewired;
            break;
          }
        }
      }
      break;
    }
    case TopologyKind::NewmanWatts: {
      detail::ring_lattice(g, params.K / 2);
      std::bernoulli_distribution coin(params.p);
      const std::size_t lattice_edges = g.edge_count();
      for (std::size_t e = 0; e < lattice_edges; ++e) {
        if (!coin(rng)) continue;
        for (int attempt = 0; attempt < detail::kMaxRedraws; ++attempt) {
          const int u = detail::uniform_node(n, rng);
          const int v = detail::uniform_node(n, rng);
          if (g.add_edge(u, v)) {
            ++g.added;
            break;
          }
        }
      }
      break;
    }
    case TopologyKind::BarabasiAlbert: {
      // Seed: the m0 initial nodes form a clique (a single edge for m0 = 2).
      for (int i = 0; i < params.m0; ++i)
        for (int j = i + 1; j < params.m0; ++j) g.add_edge(i, j);
      g.seed_edges = g.edge_count();
      for (int v = params.m0; v < n; ++v) {
        std::vector<double> weights(static_cast<std::size_t>(v));
        for (int u = 0; u < v; ++u) {
          // A degree-zero seed (m0 = 1) still needs a chance to be picked.
          weights[static_cast<std::size_t>(u)] = std::max(1, g.degree(u));
        }
        for (int k = 0; k < params.m; ++k) {
          std::discrete_distribution<int> pick(weights.begin(), weights.end());
          const int u = pick(rng);
          g.add_edge(v, u);
          weights[static_cast<std::size_t>(u)] = 0.0;  // without replacement
        }
      }
      break;
    }
  }
  return g;
}

struct StructuralStats {
  double avg_degree = 0.0;
  double clustering_coefficient = 0.0;  // mean local clustering
  double avg_path_length = 0.0;         // over reachable pairs
  bool disconnected = false;
};

/// All-pairs hop distances by BFS; -1 marks unreachable.
inline std::vector<std::vector<int>> hop_distances(const Graph& g) {
  const int n = g.size();
  std::vector<std::vector<int>> dist(static_cast<std::size_t>(n),
                                     std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int s = 0; s < n; ++s) {
    auto& d = dist[static_cast<std::size_t>(s)];
    std::deque<int> queue{s};
    d[static_cast<std::size_t>(s)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : g.neighbors(u)) {
        if (d[static_cast<std::size_t>(v)] < 0) {
          d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist;
}

inline double local_clustering(const Graph& g, int i) {
  const auto& nb = g.neighbors(i);
  const std::size_t k = nb.size();
  if (k < 2) return 0.0;
  std::size_t triangles = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (g.has_edge(nb[a], nb[b])) ++triangles;
  return static_cast<double>(triangles) / (static_cast<double>(k * (k - 1)) / 2.0);
}

inline StructuralStats structural_stats(const Graph& g) {
  StructuralStats s;
  const int n = g.size();
  if (n == 0) return s;
  s.avg_degree = 2.0 * static_cast<double>(g.edge_count()) / n;
  double c = 0.0;
  for (int i = 0; i < n; ++i) c += local_clustering(g, i);
  s.clustering_coefficient = c / n;

  const auto dist = hop_distances(g);
  double total = 0.0;
  std::size_t pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int d = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (d < 0) {
        s.disconnected = true;
      } else {
        total += d;
        ++pairs;
      }
    }
  }
  s.avg_path_length = pairs > 0 ? total / static_cast<double>(pairs) : 0.0;
  return s;
}

using Matrix = std::vector<std::vector<double>>;

inline Matrix zero_matrix(int n) {
  return Matrix(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

/// Completed-interaction counts N_ij, current run plus one matrix per
/// recorded replication.
class CoopHistory {
 public:
  explicit CoopHistory(int n = 0) : current_(zero_matrix(n)) {}

  [[nodiscard]] int size() const noexcept { return static_cast<int>(current_.size()); }

  /// One completed interaction between i and j in the current run.
  void record(int i, int j, double count = 1.0) {
    if (i == j) return;
    current_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)) += count;
    current_.at(static_cast<std::size_t>(j)).at(static_cast<std::size_t>(i)) += count;
  }

  void set_current(Matrix counts) { current_ = std::move(counts); }
  void push_run(Matrix counts) { runs_.push_back(std::move(counts)); }

  [[nodiscard]] const Matrix& current() const noexcept { return current_; }
  [[nodiscard]] const std::vector<Matrix>& runs() const noexcept { return runs_; }

 private:
  Matrix current_;
  std::vector<Matrix> runs_;
};

/// P_ij = N_ij / mean_t N_ij^(t). Zero denominators give 0.
inline Matrix cooperation_intensity(const CoopHistory& h) {
  const int n = h.size();
  Matrix p = zero_matrix(n);
  const auto& runs = h.runs();
  if (runs.empty()) return p;
  const double t = static_cast<double>(runs.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double sum = 0.0;
      for (const auto& r : runs) sum += r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double denom = sum / t;
      if (denom > 0.0) {
        p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            h.current()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / denom;
      }
    }
  }
  return p;
}

/// phi_i = sum_j a_ij P_ij.
inline double amplification(const Graph& g, const Matrix& p, int i) {
  double phi = 0.0;
  for (int j : g.neighbors(i)) {
    phi += p.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
  }
  return phi;
}

/// Amplification with unit intensity on every edge, i.e. the node degree.
inline std::vector<double> structural_amplification(const Graph& g) {
  std::vector<double> phi(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) phi[static_cast<std::size_t>(i)] = g.degree(i);
  return phi;
}

/// phi_i / max_j phi_j, or all zeros when every phi is zero.
inline std::vector<double> normalize_amplification(std::span<const double> phi) {
  std::vector<double> out(phi.size(), 0.0);
  const double hi = phi.empty() ? 0.0 : *std::max_element(phi.begin(), phi.end());
  if (hi <= 0.0) return out;
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] / hi;
  return out;
}

/// Engine form: s * (1 + lambda_w * phi_hat). Never drops below the baseline,
/// so isolated agents keep their own capability.
inline double effective_capability(double s_base, double phi_hat, double lambda_w) {
  return s_base * (1.0 + lambda_w * phi_hat);
}

/// Literal multiplicative form s * phi, reported for analysis only.
inline double literal_capability(double s_base, double phi) { return s_base * phi; }

/// Edge list: a '#' header line with kind and parameters, then "i j" lines.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  const auto& p = g.params();
  os << "# kind=" << to_string(g.kind()) << " n=" << g.size() << " edges=" << g.edge_count()
     << " K=" << p.K << " p=" << p.p << " L=" << p.links.value_or(default_link_count(g.size()))
     << " m0=" << p.m0 << " m=" << p.m << '\n';
  for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

}  // namespace svcmarket
