#include "resilient_consensus/topology.h"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.h"

namespace rc = resilient_consensus;
using rc::DiscardSet;
using rc::SubsetTable;
using rc::Topology;

TEST(DiscardSet, SortsAndRejectsDuplicates) {
  EXPECT_EQ(DiscardSet({3, 1, 2}).members(), (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(DiscardSet({1, 1}), std::invalid_argument);
  EXPECT_THROW(DiscardSet({0}), std::invalid_argument);
}

TEST(DiscardSet, CanonicalOrderIsSizeThenLexicographic) {
  EXPECT_LT(DiscardSet{}, DiscardSet({5}));
  EXPECT_LT(DiscardSet({9}), DiscardSet({1, 2}));
  EXPECT_LT(DiscardSet({1, 3}), DiscardSet({2, 3}));
  EXPECT_LT(DiscardSet({1, 2}), DiscardSet({1, 3}));
}

TEST(DiscardSet, TextRoundTrip) {
  for (const DiscardSet& s : {DiscardSet{}, DiscardSet({4}), DiscardSet({1, 2, 7})}) {
    EXPECT_EQ(DiscardSet::Parse(s.ToString()), s);
  }
  EXPECT_EQ(DiscardSet({1, 2}).ToString(), "{1 2}");
  EXPECT_EQ(DiscardSet{}.ToString(), "{}");
}

TEST(SubsetTable, ThreeAgentsOneFault) {
  SubsetTable t(3, 1);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.at(0), DiscardSet{});
  EXPECT_EQ(t.at(1), DiscardSet({1}));
  EXPECT_EQ(t.at(2), DiscardSet({2}));
  EXPECT_EQ(t.at(3), DiscardSet({3}));
}

TEST(SubsetTable, KnownCounts) {
  EXPECT_EQ(SubsetTable(10, 3).size(), 176u);
  EXPECT_EQ(SubsetTable(5, 2).size(), 16u);
  EXPECT_EQ(SubsetTable(12, 3).size(), 299u);
  EXPECT_EQ(rc::CountDiscardSets(5, 1), 6u);
}

TEST(SubsetTable, RejectsDiscardingEveryone) {
  EXPECT_THROW(SubsetTable(3, 3), std::invalid_argument);
  EXPECT_THROW(SubsetTable(3, -1), std::invalid_argument);
}

TEST(SubsetTableProperty, CountMatchesBinomialSum) {
  for (int n = 1; n <= 12; ++n) {
    for (int f = 0; f <= std::min(3, n - 1); ++f) {
      EXPECT_EQ(SubsetTable(n, f).size(), rc_test::BinomialSum(n, f))
          << "n=" << n << " f=" << f;
    }
  }
}

TEST(SubsetTableProperty, OrderIsStrictAndLookupIsIdentity) {
  for (int n = 1; n <= 9; ++n) {
    for (int f = 0; f <= std::min(3, n - 1); ++f) {
      SubsetTable t(n, f);
      for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(t.index_of(t.at(i)), i);
        if (i > 0) EXPECT_LT(t.at(i - 1), t.at(i));
      }
    }
  }
}

TEST(SubsetTableProperty, ExtendAndShrinkAgreeWithSetAlgebra) {
  SubsetTable t(7, 3);
  for (std::size_t o = 0; o < t.size(); ++o) {
    const DiscardSet& s = t.at(o);
    for (int v = 1; v <= 7; ++v) {
      auto ext = t.extend(o, v);
      if (s.contains(v) || s.size() == 3) {
        EXPECT_FALSE(ext);
      } else {
        ASSERT_TRUE(ext);
        EXPECT_EQ(t.at(*ext), s.with(v));
      }
      auto shr = t.shrink(o, v);
      EXPECT_EQ(shr.has_value(), s.contains(v));
      if (shr) EXPECT_EQ(t.at(*shr), s.without(v));
    }
  }
}

TEST(SubsetTable, IndexOfUnknownSetThrows) {
  SubsetTable t(4, 1);
  EXPECT_THROW(t.index_of(DiscardSet({1, 2})), std::out_of_range);
  EXPECT_FALSE(t.find(DiscardSet({1, 2})));
}

TEST(Topology, RejectsSelfLoopsAndBadIds) {
  EXPECT_THROW(Topology(3, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(Topology(3, {{1, 4}}), std::invalid_argument);
  EXPECT_THROW(Topology(3, {{0, 2}}), std::invalid_argument);
}

TEST(Topology, EdgesAreUndirectedAndDeduplicated) {
  Topology t(3, {{2, 1}, {1, 2}, {3, 2}});
  EXPECT_EQ(t.edges().size(), 2u);
  EXPECT_TRUE(t.adjacent(1, 2));
  EXPECT_TRUE(t.adjacent(2, 1));
  EXPECT_EQ(t.neighbors(2), (std::vector<int>{1, 3}));
}

TEST(Topology, RejectsDirectedAdjacency) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(3, 3);
  a(0, 1) = 1;
  EXPECT_THROW(Topology::FromAdjacency(a), std::invalid_argument);
  a(1, 0) = 1;
  EXPECT_EQ(Topology::FromAdjacency(a).edges().size(), 1u);
}

TEST(Topology, G1NeighborLists) {
  Topology g = rc::builtin::G1Example();
  EXPECT_EQ(g.neighbors(1), (std::vector<int>{2, 3}));
  EXPECT_EQ(g.neighbors(2), (std::vector<int>{1, 4, 5}));
  EXPECT_EQ(g.neighbors(3), (std::vector<int>{1, 4}));
  EXPECT_EQ(g.neighbors(4), (std::vector<int>{2, 3, 5}));
  EXPECT_EQ(g.neighbors(5), (std::vector<int>{2, 4}));
}

TEST(Topology, Regular4Of10IsFourRegular) {
  Topology g = rc::builtin::Regular4Of10();
  for (int v = 1; v <= 10; ++v) EXPECT_EQ(g.degree(v), 4);
}

TEST(Topology, MakeBuiltinParsesNames) {
  EXPECT_EQ(rc::MakeBuiltin("ring(7)").edges().size(), 7u);
  EXPECT_EQ(rc::MakeBuiltin("complete(5)").edges().size(), 10u);
  EXPECT_EQ(rc::MakeBuiltin("star(4)").degree(1), 3);
  EXPECT_EQ(rc::MakeBuiltin("path(3)").edges().size(), 2u);
  EXPECT_EQ(rc::MakeBuiltin("g1_example").agent_count(), 5);
  EXPECT_THROW(rc::MakeBuiltin("torus(3)"), std::invalid_argument);
}

TEST(Topology, ParseEdgeList) {
  std::istringstream in("# a triangle\n1 2\n\n2 3  # tail comment\n3 1\n");
  Topology t = rc::ParseEdgeList(in);
  EXPECT_EQ(t.agent_count(), 3);
  EXPECT_EQ(t.edges().size(), 3u);
  std::istringstream bad("1 x\n");
  EXPECT_THROW(rc::ParseEdgeList(bad), std::invalid_argument);
}

TEST(Connectivity, CutVertexOfPath) {
  Topology p = rc::builtin::Path(3);
  EXPECT_FALSE(rc::IsConnectedAfterRemoval(p, DiscardSet({2})));
  EXPECT_TRUE(rc::IsConnectedAfterRemoval(p, DiscardSet({1})));
}

TEST(Connectivity, G1WithoutAgentOne) {
  EXPECT_TRUE(rc::IsConnectedAfterRemoval(rc::builtin::G1Example(), DiscardSet({1})));
}

TEST(Connectivity, EmptyDiscardIsPlainConnectivity) {
  EXPECT_TRUE(rc::IsConnectedAfterRemoval(rc::builtin::Ring(5), DiscardSet{}));
  EXPECT_FALSE(rc::IsConnectedAfterRemoval(Topology(3, {{1, 2}}), DiscardSet{}));
}

TEST(Connectivity, SingleSurvivorIsConnectedNoSurvivorThrows) {
  Topology t(2, {});
  EXPECT_TRUE(rc::IsConnectedAfterRemoval(t, DiscardSet({1})));
  EXPECT_THROW(rc::IsConnectedAfterRemoval(t, DiscardSet({1, 2})), std::invalid_argument);
}

TEST(ConnectivityProperty, AgreesWithBfsOnRandomGraphs) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_real_distribution<double> density(0.15, 0.8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const auto edges = rc_test::RandomEdges(n, density(rng), rng);
    Topology t(n, edges);
    SubsetTable table(n, std::min(2, n - 1));
    for (const DiscardSet& s : table.sets()) {
      EXPECT_EQ(rc::IsConnectedAfterRemoval(t, s),
                rc_test::BfsConnected(n, edges, rc_test::ToSet(s)))
          << "trial " << trial << " discard " << s.ToString();
    }
  }
}

TEST(Validate, StarCenterSeesEveryone) {
  auto r = rc::Validate(rc::builtin::Star(4), 0);
  EXPECT_TRUE(r.connected_after_every_discard);
  EXPECT_FALSE(r.no_full_neighborhood);
  EXPECT_EQ(r.offending_agents, (std::vector<int>{1}));
}

TEST(Validate, CompleteGraphFails) {
  EXPECT_FALSE(rc::Validate(rc::builtin::Complete(4), 1).no_full_neighborhood);
}

// In G1 with agent 1 removed, agent 4 neighbors 2, 3, 5: all survivors.
// With agent 3 removed, agent 2 neighbors 1, 4, 5.
TEST(Validate, G1HasFullNeighborhoodSubnetworks) {
  auto r = rc::Validate(rc::builtin::G1Example(), 1, DiscardSet({1}));
  EXPECT_TRUE(r.connected_after_every_discard);
  EXPECT_FALSE(r.no_full_neighborhood);
  EXPECT_EQ(r.offending_agents, (std::vector<int>{2, 4}));
  EXPECT_EQ(r.full_neighborhood_sets, (std::vector<DiscardSet>{DiscardSet({1}), DiscardSet({3})}));
  ASSERT_TRUE(r.fault_free_no_full_neighborhood);
  EXPECT_FALSE(*r.fault_free_no_full_neighborhood);
  EXPECT_EQ(rc::FullNeighborhoodAgents(rc::builtin::G1Example(), DiscardSet({1})),
            (std::vector<int>{4}));
}

TEST(Validate, CirculantPassesWithThreeFaults) {
  auto r = rc::Validate(rc::builtin::Regular4Of10(), 3, DiscardSet({1, 2, 3}));
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.offending_sets.empty());
  EXPECT_TRUE(r.offending_agents.empty());
  EXPECT_TRUE(*r.fault_free_no_full_neighborhood);
}

TEST(Validate, RingFailsWithTwoRemovals) {
  auto r = rc::Validate(rc::builtin::Ring(6), 2);
  EXPECT_FALSE(r.connected_after_every_discard);
  EXPECT_FALSE(r.offending_sets.empty());
}

TEST(ValidateProperty, ListsEmptyIffFlagsTrue) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 6;
    Topology t(n, rc_test::RandomEdges(n, 0.6, rng));
    auto r = rc::Validate(t, std::min(2, n - 1));
    EXPECT_EQ(r.connected_after_every_discard, r.offending_sets.empty());
    EXPECT_EQ(r.no_full_neighborhood, r.offending_agents.empty());
  }
}

TEST(ValidateProperty, ZeroFaultsReducesToWholeGraph) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const auto edges = rc_test::RandomEdges(n, 0.5, rng);
    Topology t(n, edges);
    auto r = rc::Validate(t, 0);
    EXPECT_EQ(r.connected_after_every_discard, rc_test::BfsConnected(n, edges, {}));
    bool full = false;
    for (int v = 1; v <= n; ++v) full = full || t.degree(v) == n - 1;
    EXPECT_EQ(r.no_full_neighborhood, !full);
  }
}
