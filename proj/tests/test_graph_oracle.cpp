#include <gtest/gtest.h>

#include "oracles/graph_equivalence.hpp"

using oracle::Graph;
using oracle::Oracle;
using oracle::Q;

TEST(Oracle, SelfChecks) {
  const Oracle loop(Graph{"loop", 1, {{0, 0, Q(1)}}});
  const auto walks = loop.closed_geodesics(Q(3));
  ASSERT_EQ(walks.size(), 3u);
  EXPECT_TRUE(loop.is_one_over_k(walks[0], 2));
  EXPECT_EQ(loop.min_window_distance({{0, 1}, {0, 1}}, 2), Q(0));
  EXPECT_TRUE(loop.is_one_over_k({{0, 1}, {0, 1}}, 4));
  EXPECT_FALSE(loop.is_one_over_k({{0, 1}, {0, 1}}, 3));

  const Oracle theta(Graph{"theta", 2, {{0, 1, Q(1)}, {0, 1, Q(1)}, {0, 1, Q(1)}}});
  EXPECT_EQ(theta.spectrum_one_over_k(2, Q(9, 2)), std::set<Q>{Q(2)});
  EXPECT_EQ(theta.closed_geodesics(Q(2)).size(), 3u);
  EXPECT_EQ(theta.diameter_lower_bound(), Q(1));

  const Oracle path(Graph{"path", 3, {{0, 1, Q(1)}, {1, 2, Q(3, 2)}}});
  EXPECT_TRUE(path.closed_geodesics(Q(20)).empty());
  EXPECT_EQ(path.vertex_distance(0, 2), Q(5, 2));
}

TEST(Oracle, CrossingPointsAreFound) {
  // lollipop stick traversed out and back inside a longer closed walk
  const Oracle g(Graph{"lollipop", 2, {{0, 1, Q(1)}, {1, 1, Q(2)}, {0, 0, Q(3, 2)}}});
  const oracle::Walk w = {{0, 1}, {1, 1}, {0, -1}, {2, 1}};
  EXPECT_EQ(g.length(w), Q(11, 2));
  EXPECT_EQ(g.min_window_distance(w, 2), Q(0));
}

TEST(Oracle, SuiteSize) {
  const auto suite = oracle::generator_suite();
  int connected = 0;
  for (const auto& g : suite) {
    EXPECT_LE(g.n, 5);
    EXPECT_LE(g.edges.size(), 8u);
    if (Oracle(g).connected()) ++connected;
  }
  EXPECT_GE(connected, 50);
}

TEST(Oracle, LibraryMatchesOracle) {
  const auto r = oracle::check_graph_suite(oracle::generator_suite());
  EXPECT_GE(r.graphs, 50);
  for (const auto& m : r.mismatches) ADD_FAILURE() << m;
}
