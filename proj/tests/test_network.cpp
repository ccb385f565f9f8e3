#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "svcmarket/network.hpp"
#include "svcmarket/stats.hpp"
#include "test_util.hpp"

using namespace svcmarket;

namespace {

Graph make(TopologyKind k, int n, TopologyParams p = {}, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  return generate_topology(k, n, p, rng);
}

}  // namespace

TEST(Topology, CompleteGraph) {
  const auto g = make(TopologyKind::GloballyCoupled, 12);
  EXPECT_EQ(g.edge_count(), 66u);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(degree(g, i), 11);
  const auto s = structural_stats(g);
  EXPECT_DOUBLE_EQ(s.clustering_coefficient, 1.0);
  EXPECT_DOUBLE_EQ(s.avg_path_length, 1.0);
  EXPECT_FALSE(s.disconnected);
}

TEST(Topology, RingDegreesAndPathLength) {
  const auto g = make(TopologyKind::Ring, 12);
  EXPECT_EQ(g.edge_count(), 12u);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(degree(g, i), 2);
  // Distances on a 12-cycle from any node: 1,1,2,2,3,3,4,4,5,5,6.
  double sum = 0.0;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) sum += std::min(j - i, 12 - (j - i));
  const auto s = structural_stats(g);
  EXPECT_NEAR(s.avg_path_length, sum / 66.0, 1e-12);
  EXPECT_NEAR(s.avg_path_length, 3.272727272727, 1e-9);
  EXPECT_DOUBLE_EQ(s.avg_degree, 2.0);
}

TEST(Topology, StarHubAndLeaves) {
  const auto g = make(TopologyKind::Star, 12);
  EXPECT_EQ(g.edge_count(), 11u);
  EXPECT_EQ(degree(g, 0), 11);
  for (int i = 1; i < 12; ++i) EXPECT_EQ(degree(g, i), 1);
}

TEST(Topology, IsolatedHasNoEdges) {
  const auto g = make(TopologyKind::Isolated, 12);
  EXPECT_EQ(g.edge_count(), 0u);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(degree(g, i), 0);
  const auto s = structural_stats(g);
  EXPECT_DOUBLE_EQ(s.avg_degree, 0.0);
  EXPECT_DOUBLE_EQ(s.avg_path_length, 0.0);
  EXPECT_TRUE(s.disconnected);
}

TEST(Topology, RandomLinksExact) {
  EXPECT_EQ(default_link_count(12), 17);  // round(132 / 8) = round(16.5)
  TopologyParams p;
  p.links = 16;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto g = make(TopologyKind::RandomGNL, 12, p, seed);
    EXPECT_EQ(g.edge_count(), 16u);
    EXPECT_TRUE(testing_util::simple_graph(g));
  }
}

TEST(Topology, RandomLinksRejectsTooMany) {
  TopologyParams p;
  p.links = 67;
  EXPECT_THROW(make(TopologyKind::RandomGNL, 12, p), BadParams);
}

TEST(Topology, WattsStrogatzZeroRewireIsLattice) {
  TopologyParams p;
  p.K = 4;
  p.p = 0.0;
  const auto g = make(TopologyKind::WattsStrogatz, 12, p);
  EXPECT_EQ(g.edge_count(), 24u);
  for (int i = 0; i < 12; ++i) {
    EXPECT_TRUE(g.has_edge(i, (i + 1) % 12));
    EXPECT_TRUE(g.has_edge(i, (i + 2) % 12));
  }
  EXPECT_EQ(g.rewired, 0u);
}

TEST(Topology, WattsStrogatzFullRewireTouchesEveryEdge) {
  TopologyParams p;
  p.K = 4;
  p.p = 1.0;
  const auto g = make(TopologyKind::WattsStrogatz, 12, p, 5);
  EXPECT_EQ(g.rewired, 24u);
  EXPECT_EQ(g.edge_count(), 24u);
}

TEST(Topology, WattsStrogatzOddKRejected) {
  TopologyParams p;
  p.K = 3;
  EXPECT_THROW(make(TopologyKind::WattsStrogatz, 12, p), BadParams);
}

TEST(Topology, NewmanWattsAddsOnly) {
  TopologyParams p;
  p.K = 4;
  p.p = 0.3;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto g = make(TopologyKind::NewmanWatts, 12, p, seed);
    EXPECT_EQ(g.edge_count(), 24u + g.added);
    for (int i = 0; i < 12; ++i) EXPECT_TRUE(g.has_edge(i, (i + 1) % 12));
  }
}

TEST(Topology, BarabasiAlbertEdgeLaw) {
  TopologyParams p;
  p.m0 = 2;
  p.m = 2;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto g = make(TopologyKind::BarabasiAlbert, 12, p, seed);
    EXPECT_EQ(g.size(), 12);
    EXPECT_EQ(g.seed_edges, 1u);
    EXPECT_EQ(g.edge_count(), 1u + 20u);
    EXPECT_TRUE(testing_util::simple_graph(g));
  }
}

TEST(Topology, BarabasiAlbertRejectsMAboveM0) {
  TopologyParams p;
  p.m0 = 2;
  p.m = 3;
  EXPECT_THROW(make(TopologyKind::BarabasiAlbert, 12, p), BadParams);
}

TEST(Topology, BarabasiAlbertOlderNodesRicher) {
  TopologyParams p;
  p.m0 = 2;
  p.m = 2;
  std::vector<double> age, deg;
  std::mt19937_64 rng(11);
  for (int run = 0; run < 200; ++run) {
    const auto g = generate_topology(TopologyKind::BarabasiAlbert, 100, p, rng);
    for (int i = 0; i < 100; ++i) {
      age.push_back(i);
      deg.push_back(g.degree(i));
    }
  }
  EXPECT_LT(stats::pearson(age, deg), 0.0);
}

TEST(Topology, NoSelfLoopsOrMultiEdgesInSmallWorlds) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    TopologyParams p;
    p.K = 4;
    p.p = prob(rng);
    const auto ws = generate_topology(TopologyKind::WattsStrogatz, 12, p, rng);
    const auto nw = generate_topology(TopologyKind::NewmanWatts, 12, p, rng);
    ASSERT_TRUE(testing_util::simple_graph(ws));
    ASSERT_TRUE(testing_util::simple_graph(nw));
  }
}

TEST(Topology, DegreeOutOfRange) {
  const auto g = make(TopologyKind::Ring, 5);
  EXPECT_THROW(degree(g, 5), NodeOutOfRange);
  EXPECT_THROW(degree(g, -1), NodeOutOfRange);
}

TEST(Topology, ParseNames) {
  EXPECT_EQ(parse_topology("GovB"), TopologyKind::GloballyCoupled);
  EXPECT_EQ(parse_topology("GovF"), TopologyKind::WattsStrogatz);
  EXPECT_EQ(parse_topology("isolated"), TopologyKind::Isolated);
  EXPECT_FALSE(parse_topology("GovZ").has_value());
  for (auto k : kAllTopologies) EXPECT_EQ(parse_topology(preset_name(k)), k);
}

TEST(Topology, EdgeListExport) {
  const auto g = make(TopologyKind::Star, 4);
  std::ostringstream os;
  write_edge_list(os, g);
  const auto text = os.str();
  EXPECT_EQ(text.rfind("# kind=", 0), 0u);
  EXPECT_NE(text.find("\n0 1\n0 2\n0 3\n"), std::string::npos);
}

TEST(Cooperation, IdenticalRunsGiveOne) {
  CoopHistory h(3);
  Matrix m = zero_matrix(3);
  m[0][1] = m[1][0] = 4;
  for (int t = 0; t < 3; ++t) h.push_run(m);
  h.set_current(m);
  const auto p = cooperation_intensity(h);
  EXPECT_DOUBLE_EQ(p[0][1], 1.0);
  EXPECT_DOUBLE_EQ(p[1][0], 1.0);
  EXPECT_DOUBLE_EQ(p[0][2], 0.0);
}

TEST(Cooperation, RatioToMeanOfRuns) {
  CoopHistory h(2);
  for (double c : {2.0, 4.0, 6.0}) {
    Matrix m = zero_matrix(2);
    m[0][1] = m[1][0] = c;
    h.push_run(m);
  }
  h.record(0, 1, 6.0);
  const auto p = cooperation_intensity(h);
  EXPECT_DOUBLE_EQ(p[0][1], 1.5);
}

TEST(Cooperation, RecordIsSymmetricWithZeroDiagonal) {
  CoopHistory h(3);
  h.record(0, 2);
  h.record(2, 0);
  h.record(1, 1);
  EXPECT_DOUBLE_EQ(h.current()[0][2], 2.0);
  EXPECT_DOUBLE_EQ(h.current()[2][0], 2.0);
  EXPECT_DOUBLE_EQ(h.current()[1][1], 0.0);
}

TEST(Amplification, SumOverNeighbours) {
  Graph g(3, TopologyKind::RandomGNL, {});
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  Matrix p = zero_matrix(3);
  p[0][1] = p[1][0] = 1.5;
  p[0][2] = p[2][0] = 0.5;
  EXPECT_DOUBLE_EQ(amplification(g, p, 0), 2.0);
}

TEST(Amplification, IsolatedAndComplete) {
  const auto iso = make(TopologyKind::Isolated, 6);
  const auto full = make(TopologyKind::GloballyCoupled, 6);
  Matrix ones(6, std::vector<double>(6, 1.0));
  for (int i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(amplification(iso, ones, i), 0.0);
    EXPECT_DOUBLE_EQ(amplification(full, ones, i), 5.0);
  }
}

TEST(Amplification, MonotoneInEdges) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> w(0.0, 3.0);
  std::uniform_int_distribution<int> node(0, 7);
  Matrix p = zero_matrix(8);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) p[i][j] = p[j][i] = w(rng);
  Graph g(8, TopologyKind::RandomGNL, {});
  for (int step = 0; step < 40; ++step) {
    const int a = node(rng), b = node(rng);
    const double before = amplification(g, p, a);
    g.add_edge(a, b);
    EXPECT_GE(amplification(g, p, a), before);
  }
}

TEST(Capability, EngineForm) {
  EXPECT_DOUBLE_EQ(effective_capability(2.0, 1.0, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(effective_capability(2.0, 0.7, 0.0), 2.0);
  const std::vector<double> zeros{0, 0, 0};
  for (double h : normalize_amplification(zeros)) EXPECT_DOUBLE_EQ(effective_capability(1.5, h, 0.25), 1.5);
  const std::vector<double> phi{1, 2, 4};
  const auto hat = normalize_amplification(phi);
  EXPECT_DOUBLE_EQ(hat[0], 0.25);
  EXPECT_DOUBLE_EQ(hat[2], 1.0);
  EXPECT_DOUBLE_EQ(literal_capability(2.0, 3.0), 6.0);
}
