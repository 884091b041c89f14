#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lsl/energy.hpp"
#include "lsl/parallel.hpp"
#include "lsl/spectra.hpp"

using namespace lsl;

namespace {

ProductPoint circle_tuple(const SpaceHandle& c, std::vector<double> s) {
  ProductPoint p{c, {}};
  for (double x : s) p.points.push_back(CirclePoint{x});
  return p;
}

ProductPoint equator_tuple(const SpaceHandle& s2, int k, double phase = 0.0) {
  ProductPoint p{s2, {}};
  for (int i = 0; i < k; ++i) {
    const double a = phase + kTwoPi * i / k;
    p.points.push_back(SpherePoint{{std::cos(a), std::sin(a), 0.0}});
  }
  return p;
}

ProductPoint torus_line(const SpaceHandle& t, int k) {
  ProductPoint p{t, {}};
  for (int i = 0; i < k; ++i) p.points.push_back(TorusPoint{{kTwoPi * i / k, 0.3}});
  return p;
}

SearchOptions quick(int starts, std::uint64_t seed = 1) {
  SearchOptions o;
  o.n_starts = starts;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(UniformEnergy, Examples) {
  const auto c = make_circle(kPi);
  EXPECT_NEAR(uniform_energy(circle_tuple(c, {0, kTwoPi / 3, 2 * kTwoPi / 3})), 4 * kPi * kPi, 1e-12);
  EXPECT_EQ(uniform_energy(circle_tuple(c, {1.0, 1.0, 1.0})), 0.0);
  const auto t = make_torus({kPi, kPi});
  ProductPoint p{t, {TorusPoint{{0, 0}}, TorusPoint{{kPi, 0}}}};
  EXPECT_NEAR(uniform_energy(p), 4 * kPi * kPi, 1e-12);
}

TEST(UniformEnergy, WeightedMatchesUniform) {
  const auto c = make_circle(kPi);
  const auto p = circle_tuple(c, {0.1, 1.7, 4.0, 5.2});
  EXPECT_NEAR(weighted_energy(EnergySpec::uniform(c, 4), p), uniform_energy(p), 1e-12);
  EXPECT_THROW(weighted_energy(EnergySpec{c, {1, 1, 1, 0}}, p), Error);
}

TEST(EnergyGradient, Examples) {
  const auto c = make_circle(kPi);
  EXPECT_LE(gradient_norm(energy_gradient(circle_tuple(c, {0, kTwoPi / 3, 2 * kTwoPi / 3}))), 1e-12);
  EXPECT_GT(gradient_norm(energy_gradient(circle_tuple(c, {0, kPi / 2}))), 1.0);
  try {
    energy_gradient(circle_tuple(c, {0, kPi}));
    FAIL() << "antipodal neighbours must be rejected";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonsmoothPoint);
  }
  EXPECT_THROW(energy_gradient(ProductPoint{make_finite({{0, 1}, {1, 0}}), {FinitePoint{0}, FinitePoint{1}}}),
               Error);
}

TEST(EnergyGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  const std::vector<SpaceHandle> spaces = {make_circle(kPi), make_torus({kPi, kPi / 2}), make_sphere(2)};
  std::normal_distribution<double> gauss;
  for (const auto& sp : spaces) {
    int checked = 0;
    while (checked < 100) {
      const int k = 3 + checked % 4;
      ProductPoint p{sp, {}};
      for (int i = 0; i < k; ++i) p.points.push_back(random_point(*sp, rng));
      std::vector<Tangent> g;
      try {
        g = energy_gradient(p);
      } catch (const Error&) {
        continue;
      }
      // Random tangent direction, directional derivative by central differences.
      std::vector<Tangent> v;
      double dot = 0;
      for (int i = 0; i < k; ++i) {
        Tangent t(g[i].size(), 0.0);
        for (const auto& e : tangent_basis(*sp, p.points[i])) {
          const double c = gauss(rng);
          for (std::size_t a = 0; a < t.size(); ++a) t[a] += c * e[a];
        }
        for (std::size_t a = 0; a < t.size(); ++a) dot += t[a] * g[i][a];
        v.push_back(std::move(t));
      }
      const double h = 1e-5;
      auto moved = [&](double s) {
        ProductPoint q{sp, {}};
        for (int i = 0; i < k; ++i) {
          Tangent t = v[i];
          for (double& x : t) x *= s;
          q.points.push_back(exp_map(*sp, p.points[i], t));
        }
        return uniform_energy(q);
      };
      const double fd = (moved(h) - moved(-h)) / (2 * h);
      double vn = 0;
      for (const auto& t : v) {
        for (double x : t) vn += x * x;
      }
      EXPECT_LE(std::abs(fd - dot), 1e-6 * (gradient_norm(g) * std::sqrt(vn) + 1.0)) << sp->kind_name();
      ++checked;
    }
  }
}

TEST(Descent, EnergyNeverIncreases) {
  std::mt19937_64 rng(11);
  const auto s2 = make_sphere(2);
  for (int trial = 0; trial < 20; ++trial) {
    ProductPoint p{s2, {}};
    for (int i = 0; i < 4; ++i) p.points.push_back(random_point(*s2, rng));
    const auto r = gradient_descent(p);
    for (std::size_t i = 1; i < r.energies.size(); ++i) EXPECT_LE(r.energies[i], r.energies[i - 1]);
  }
}

TEST(TupleToCurve, Examples) {
  const auto c = make_circle(kPi);
  EXPECT_NEAR(tuple_to_curve(circle_tuple(c, {0, kTwoPi / 3, 2 * kTwoPi / 3})).length(), kTwoPi, 1e-12);

  const auto s2 = make_sphere(2);
  const auto eq = tuple_to_curve(equator_tuple(s2, 3));
  EXPECT_NEAR(eq.length(), kTwoPi, 1e-12);
  EXPECT_TRUE(same_curve(eq, great_circle(s2, SpherePoint{{1, 0, 0}}, {0, 1, 0})));
  EXPECT_FALSE(same_curve(eq, great_circle(s2, SpherePoint{{1, 0, 0}}, {0, -1, 0})));

  const auto t = make_torus({kPi, kPi});
  const auto line = tuple_to_curve(torus_line(t, 3));
  EXPECT_NEAR(line.length(), kTwoPi, 1e-12);
  for (const auto& b : line.breakpoints()) EXPECT_NEAR(std::get<TorusPoint>(b).s[1], 0.3, 1e-12);
  EXPECT_TRUE(same_curve(line, torus_geodesic(t, {1, 0}, TorusPoint{{0, 0.3}})));
}

TEST(Rotating, Examples) {
  const auto c = make_circle(kPi);
  EXPECT_TRUE(is_rotating_critical(circle_tuple(c, {0, kTwoPi / 3, 2 * kTwoPi / 3})));
  const auto s2 = make_sphere(2);
  EXPECT_TRUE(is_rotating_critical(equator_tuple(s2, 4, 0.2)));
  EXPECT_TRUE(is_rotating_critical(equator_tuple(s2, 3)));
  const auto t = make_torus({kPi, kPi});
  EXPECT_TRUE(is_rotating_critical(torus_line(t, 3)));
}

TEST(Rotating, SquareTubeCornersFail) {
  // Thin box around a flat square: corners are joined along the rim, side
  // midpoints by shortcuts over the top face.
  const auto m = make_mesh(box_mesh({1.0, 1.0, 0.05}, 4, 4));
  const auto& mesh = *m->as<MeshSurface>();
  const auto& eq = mesh.seed_cycles().front();
  ASSERT_EQ(eq.size(), 16u);
  ProductPoint corners{m, {}};
  for (std::size_t i = 0; i < 16; i += 4) corners.points.push_back(mesh.vertex_point(eq[i]));
  EXPECT_NEAR(tuple_to_curve(corners).length(), 8.0, 1e-9);
  EXPECT_FALSE(is_rotating_critical(corners, 4));

  const auto cube = make_mesh(box_mesh({1.0, 1.0, 1.0}, 4, 4));
  ProductPoint around{cube, {}};
  for (std::size_t i = 0; i < 16; i += 4) around.points.push_back(cube->as<MeshSurface>()->vertex_point(eq[i]));
  EXPECT_TRUE(is_rotating_critical(around, 4));
}

TEST(Hessian, CircleTriple) {
  const auto c = make_circle(kPi);
  const auto h = hessian_index(circle_tuple(c, {0.4, 0.4 + kTwoPi / 3, 0.4 + 2 * kTwoPi / 3}));
  EXPECT_EQ(h.index, 0);
  EXPECT_GE(h.nullity, 1);
  EXPECT_FALSE(h.ill_conditioned);
  ASSERT_EQ(h.eigenvalues.size(), 3u);
  EXPECT_NEAR(h.eigenvalues[1], 18.0, 1e-3);
  EXPECT_NEAR(h.eigenvalues[2], 18.0, 1e-3);
}

TEST(Hessian, TorusLine) {
  const auto h = hessian_index(torus_line(make_torus({kPi, kPi}), 3));
  EXPECT_EQ(h.index, 0);
  EXPECT_GE(h.nullity, 2);
}

TEST(Hessian, SphereEquatorIsSaddle) {
  const auto h = hessian_index(equator_tuple(make_sphere(2), 3));
  EXPECT_GE(h.index, 1);
  EXPECT_LE(h.index, 1 * 3);
  EXPECT_GE(h.nullity, 1);
}

TEST(Search, CircleThree) {
  const auto c = make_circle(kPi);
  const auto rep = find_critical_points(c, 3, quick(64));
  EXPECT_EQ(rep.starts, 64);
  EXPECT_GT(rep.collapsed, 0);
  ASSERT_EQ(rep.records.size(), 2u);
  for (const auto& r : rep.records) {
    EXPECT_NEAR(r.energy, 4 * kPi * kPi, 1e-8);
    EXPECT_LE(r.grad_norm, 1e-10);
    EXPECT_TRUE(r.rotating);
    ASSERT_TRUE(r.curve);
    EXPECT_NEAR(r.curve->length(), kTwoPi, 1e-9);
    EXPECT_TRUE(is_openly(*r.curve, 3));
    ASSERT_TRUE(r.hessian);
    EXPECT_EQ(r.hessian->index, 0);
  }
  EXPECT_FALSE(same_curve(*rep.records[0].curve, *rep.records[1].curve));
}

TEST(Search, CircleTwoOnlyCollapses) {
  const auto rep = find_critical_points(make_circle(kPi), 2, quick(64));
  EXPECT_TRUE(rep.records.empty());
  EXPECT_GT(rep.collapsed, 0);
}

TEST(Search, IntervalHasNoNonzeroCriticalPoints) {
  const auto iv = make_interval(1.0);
  for (int k = 2; k <= 6; ++k) {
    const auto rep = find_critical_points(iv, k, quick(32, 3));
    EXPECT_TRUE(rep.records.empty()) << k;
  }
}

TEST(Search, IndependentOfThreadCount) {
  const auto s2 = make_sphere(2);
  set_thread_count(1);
  const auto a = find_critical_points(s2, 3, quick(16, 5));
  set_thread_count(4);
  const auto b = find_critical_points(s2, 3, quick(16, 5));
  set_thread_count(1);
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.collapsed, b.collapsed);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].energy, b.records[i].energy);
}

TEST(Search, RecordsSatisfyInvariants) {
  const std::vector<std::pair<SpaceHandle, int>> cases = {
      {make_sphere(2), 3}, {make_sphere(2), 4}, {make_torus({kPi, kPi}), 3}, {make_torus({kPi, kPi / 2}), 4}};
  for (const auto& [sp, k] : cases) {
    const auto rep = find_critical_points(sp, k, quick(24, 9));
    const int n = 2;
    for (const auto& r : rep.records) {
      EXPECT_LE(r.grad_norm, 1e-10);
      if (!r.rotating) continue;
      ASSERT_TRUE(r.curve);
      EXPECT_NEAR(r.energy, r.curve->length() * r.curve->length(), 1e-8 * r.energy);
      EXPECT_TRUE(is_openly(*r.curve, k)) << sp->kind_name() << " k=" << k;
      const auto op = open_index(*r.curve, k);
      ASSERT_TRUE(op.value);
      ASSERT_TRUE(r.hessian);
      EXPECT_LE(r.hessian->index, (n - 1) * *op.value);
      EXPECT_GE(r.hessian->nullity, 1);
    }
  }
}

TEST(OpenIndex, Examples) {
  const auto c = open_index_search(make_circle(kPi), 6, quick(32));
  ASSERT_TRUE(c.value);
  EXPECT_EQ(*c.value, 3);
  EXPECT_TRUE(c.exact);

  const auto s = open_index_search(make_sphere(2), 6, quick(32));
  ASSERT_TRUE(s.value);
  EXPECT_EQ(*s.value, 3);
  EXPECT_FALSE(s.exact);

  const auto t = open_index_search(make_torus({kPi, kPi}), 6, quick(32));
  ASSERT_TRUE(t.value);
  EXPECT_EQ(*t.value, 3);
}

TEST(OpenIndex, WitnessesSampleToCriticalTuples) {
  const std::vector<SpaceHandle> spaces = {make_circle(kPi), make_sphere(2), make_torus({kPi, kPi / 2})};
  for (const auto& sp : spaces) {
    for (int k = 3; k <= 4; ++k) {
      for (const auto& e : spectrum_open_1_over_k(sp, k).entries) {
        for (const auto& w : e.witnesses) {
          for (int j = 0; j < 16; ++j) {
            ProductPoint p{sp, {}};
            for (int i = 0; i < k; ++i) p.points.push_back(w.eval(kTwoPi * j / 16 / k + kTwoPi * i / k));
            EXPECT_LE(gradient_norm(energy_gradient(p)), 1e-10) << sp->kind_name() << " k=" << k;
          }
        }
      }
    }
  }
}
