#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lsl/gh.hpp"

using namespace lsl;

namespace {

/// Lattice lengths sqrt((2 pi a)^2 + (2 pi b / j)^2), 0 < length <= R, a, b <= m.
std::vector<double> lattice(double j, int m, double R) {
  std::vector<double> out;
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; b <= m; ++b) {
      const double l = std::hypot(kTwoPi * a, kTwoPi * b / j);
      if (l > 0 && l <= R) out.push_back(l);
    }
  }
  return out;
}

double brute_hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  double h = 0;
  for (double x : a) {
    double m = INFINITY;
    for (double y : b) m = std::min(m, std::abs(x - y));
    h = std::max(h, m);
  }
  for (double y : b) {
    double m = INFINITY;
    for (double x : a) m = std::min(m, std::abs(x - y));
    h = std::max(h, m);
  }
  return h;
}

}  // namespace

TEST(Hausdorff, Examples) {
  EXPECT_EQ(hausdorff_distance_reals({kTwoPi}, {kTwoPi}), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff_distance_reals({kPi, kTwoPi}, {kTwoPi}), kPi);
  const auto a = lattice(8, 2, 10);
  EXPECT_NEAR(hausdorff_distance_reals(a, {kTwoPi, 2 * kTwoPi, 0.0}), brute_hausdorff(a, {kTwoPi, 2 * kTwoPi, 0.0}),
              1e-15);
  EXPECT_THROW(hausdorff_distance_reals({}, {1.0}), Error);
}

TEST(Hausdorff, MetricOnRandomSets) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  std::uniform_int_distribution<int> sz(1, 6);
  auto draw = [&] {
    std::vector<double> s(sz(rng));
    for (double& x : s) x = u(rng);
    return s;
  };
  for (int t = 0; t < 300; ++t) {
    const auto a = draw(), b = draw(), c = draw();
    EXPECT_EQ(hausdorff_distance_reals(a, b), hausdorff_distance_reals(b, a));
    EXPECT_EQ(hausdorff_distance_reals(a, a), 0.0);
    EXPECT_LE(hausdorff_distance_reals(a, c), hausdorff_distance_reals(a, b) + hausdorff_distance_reals(b, c) + 1e-12);
    EXPECT_NEAR(hausdorff_distance_reals(a, b), brute_hausdorff(a, b), 1e-12);
  }
}

TEST(Distortion, IdentityAndCovering) {
  const auto net = build_net(make_theta_graph(), 0.3, 0.05);
  const auto d = distance_matrix(net);
  std::vector<std::pair<std::size_t, std::size_t>> id;
  for (std::size_t i = 0; i < d.size(); ++i) id.push_back({i, i});
  EXPECT_EQ(correspondence_distortion(d, d, id), 0.0);
  id.pop_back();
  try {
    correspondence_distortion(d, d, id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonCovering);
  }
}

TEST(Distortion, TorusProjection) {
  const auto circle = make_circle(kPi);
  for (double j : {4.0, 8.0, 16.0}) {
    const auto torus = make_torus({kPi, kPi / j});
    const auto net = build_net(torus, kPi / 8, kPi / 32);
    NetSample img{circle, {}, kPi / 8, 0};
    std::vector<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < net.points.size(); ++i) {
      img.points.push_back(CirclePoint{std::get<TorusPoint>(net.points[i]).s[0]});
      rel.push_back({i, i});
    }
    const auto c = make_correspondence(distance_matrix(net), distance_matrix(img), rel);
    EXPECT_LE(c.distortion, kTwoPi / j);
    EXPECT_LE(c.distortion, kPi / j + 1e-12);
  }
}

TEST(Distortion, FlatteningEllipsoidShrinks) {
  const auto disk = ellipsoid_mesh(0.0, 8, 4, 1);
  double prev = INFINITY;
  for (double c : {0.5, 0.25, 0.1}) {
    const double d = mesh_vertex_distortion(ellipsoid_mesh(c, 8, 4, 1), disk);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 0.25);
}

TEST(GhBound, CircleWithItself) {
  const auto c = make_circle(kPi);
  for (double r : {kPi / 16, kPi / 8, kPi / 3}) {
    const auto b = gh_upper_bound(c, c, r);
    EXPECT_LE(b.bound, 2 * r + 1e-9) << r;
    EXPECT_LE(b.sharp_bound, b.bound);
  }
}

TEST(GhBound, SelfBoundOnOtherSpaces) {
  for (const auto& s : {make_theta_graph(), make_torus({kPi, kPi / 2}), make_sphere(2)}) {
    const auto b = gh_upper_bound(s, s, 0.6);
    EXPECT_LE(b.bound, 2 * 0.6 + 1e-9) << s->kind_name();
  }
}

TEST(GhBound, TorusToCircle) {
  const auto circle = make_circle(kPi);
  const double r = kPi / 32;
  for (double j : {4.0, 8.0, 16.0}) {
    GhOptions o;
    o.method = MatchMethod::kProvidedMap;
    o.map = [](const SpacePoint& p) -> SpacePoint { return CirclePoint{std::get<TorusPoint>(p).s[0]}; };
    const auto b = gh_upper_bound(make_torus({kPi, kPi / j}), circle, r, o);
    EXPECT_LE(b.bound, kPi / j + 2 * r) << j;
    EXPECT_LE(b.net_y.achieved, r);
  }
}

TEST(GhBound, ExactBijection) {
  const auto c = make_circle(kPi);
  const auto b = gh_upper_bound(c, c, 1.0, GhOptions{MatchMethod::kExactBijection, 0.25, {}});
  EXPECT_LE(b.correspondence.distortion, 1e-12);
  try {
    gh_upper_bound(c, c, 0.2, GhOptions{MatchMethod::kExactBijection, 0.05, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNetTooLarge);
  }
}

TEST(GhBound, ThetaVersusTriangle) {
  const auto tri = make_graph({"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}, "triangle");
  const auto b = gh_upper_bound(make_theta_graph(), tri, 0.25);
  EXPECT_GT(b.correspondence.distortion, 0.0);
  EXPECT_GT(b.bound, 0.0);
}

TEST(Convergence, TorusFamily) {
  const auto rep = convergence_experiment(torus_collapse_family(), {2, 4, 8, 16}, 4, 10, 1.0);
  ASSERT_EQ(rep.limit_lengths.size(), 1u);
  EXPECT_NEAR(rep.limit_lengths[0], kTwoPi, 1e-12);
  const std::vector<double> want_h = {kPi, kPi, kPi / 2, kPi / 4};
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& m = rep.members[i];
    std::vector<double> exact = lattice(m.param, 2, 10);
    exact.push_back(0.0);
    EXPECT_NEAR(m.hausdorff, brute_hausdorff(exact, {0.0, kTwoPi}), 1e-9);
    EXPECT_NEAR(m.hausdorff, want_h[i], 1e-9);
    ASSERT_TRUE(m.gh_bound);
    EXPECT_LE(*m.gh_bound, kPi / m.param + kPi / 16 + 1e-12);
  }
  EXPECT_TRUE(rep.non_increasing);
  EXPECT_FALSE(rep.strictly_decreasing);
  EXPECT_EQ(rep.members[0].inclusion, Inclusion::kFails);
  EXPECT_EQ(rep.members[3].inclusion, Inclusion::kHolds);
}

TEST(Convergence, TorusContainmentAtSeveralK) {
  for (int k : {2, 4, 6}) {
    for (double j : {2.0, 4.0, 8.0}) {
      const double eps = (k / 2) * kTwoPi / j + kEpsLen;
      const auto rep = convergence_experiment(torus_collapse_family(), {j}, k, 10, eps, false);
      EXPECT_EQ(rep.members[0].inclusion, Inclusion::kHolds) << k << " " << j;
    }
  }
}

TEST(Convergence, ConstantFamily) {
  const auto rep = convergence_experiment(constant_family(make_circle(kPi)), {1, 1, 1}, 4, 10, 0.5);
  for (const auto& m : rep.members) {
    EXPECT_EQ(m.hausdorff, 0.0);
    EXPECT_EQ(m.inclusion, Inclusion::kHolds);
  }
  EXPECT_TRUE(rep.non_increasing);
}

TEST(Gap, Examples) {
  const auto s = spectrum_1_over_k(make_sphere(2), 4, 13.0);
  EXPECT_EQ(gap_check(s, kTwoPi, 2 * kTwoPi, 0.1).verdict, GapVerdict::kGap);
  const auto t = spectrum_1_over_k(make_torus({kPi, kPi}), 4, 10.0);
  EXPECT_EQ(gap_check(t, 0.0, kTwoPi, 0.1).verdict, GapVerdict::kGap);
  const auto occ = gap_check(t, 0.0, 10.0, 0.1);
  EXPECT_EQ(occ.verdict, GapVerdict::kOccupied);
  EXPECT_FALSE(occ.occupied.empty());
  EXPECT_EQ(gap_check(t, 3.0, 3.0, 0.0).verdict, GapVerdict::kGap);
}

TEST(Convergence, EllipsoidEquatorLeavesSpectrum) {
  const auto rep = convergence_experiment(ellipsoid_flatten_family(), {1.0, 0.5, 0.25}, 3, 13.0, 0.5);
  ASSERT_EQ(rep.members.size(), 3u);
  EXPECT_TRUE(rep.members.front().seed_in_spectrum);
  EXPECT_FALSE(rep.members.back().seed_in_spectrum);
  for (std::size_t i = 1; i < rep.members.size(); ++i) {
    const auto& a = rep.members[i - 1].seed_minind;
    const auto& b = rep.members[i].seed_minind;
    ASSERT_TRUE(a);
    if (b) EXPECT_GE(*b, *a);
  }
  for (const auto& m : rep.members) {
    ASSERT_TRUE(m.gh_bound);
    EXPECT_FALSE(m.spectrum.complete);
  }
  EXPECT_LT(*rep.members.back().gh_bound, *rep.members.front().gh_bound);
}
