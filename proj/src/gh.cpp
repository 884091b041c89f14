#include "lsl/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lsl/parallel.hpp"

namespace lsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nearest(double x, const std::vector<double>& sorted) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  double best = kInf;
  if (it != sorted.end()) best = *it - x;
  if (it != sorted.begin()) best = std::min(best, x - *std::prev(it));
  return best;
}

void check_square(const DistanceMatrix& d, const char* name) {
  for (const auto& row : d) {
    if (row.size() != d.size()) throw Error(ErrorKind::kInvalidArgument, std::string(name) + " is not square");
  }
}

}  // namespace

double hausdorff_distance_reals(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::kEmptyInput, "Hausdorff distance of an empty set");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double h = 0;
  for (double x : sa) h = std::max(h, nearest(x, sb));
  for (double y : sb) h = std::max(h, nearest(y, sa));
  return h;
}

DistanceMatrix distance_matrix(const NetSample& net) {
  const std::size_t n = net.points.size();
  DistanceMatrix d(n, std::vector<double>(n, 0.0));
  if (const auto* m = net.space->as<MeshSurface>()) {
    parallel_chunks(n, n, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          d[i][j] = m->distance(std::get<MeshPoint>(net.points[i]), std::get<MeshPoint>(net.points[j]));
        }
      }
    });
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = net.space->distance(net.points[i], net.points[j]);
    }
  }
  // Mesh distances are computed per source; symmetrize to the smaller value.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = std::min(d[i][j], d[j][i]);
  }
  return d;
}

double correspondence_distortion(const DistanceMatrix& dx, const DistanceMatrix& dy,
                                 const std::vector<std::pair<std::size_t, std::size_t>> & relation) {
  check_square(dx, "first distance matrix");
  check_square(dy, "second distance matrix");
  std::vector<char> hit_x(dx.size(), 0), hit_y(dy.size(), 0);
  for (const auto& [i, j] : relation) {
    if (i >= dx.size() || j >= dy.size()) throw Error(ErrorKind::kInvalidArgument, "relation index out of range");
    hit_x[i] = hit_y[j] = 1;
  }
  if (std::count(hit_x.begin(), hit_x.end(), 0) || std::count(hit_y.begin(), hit_y.end(), 0)) {
    throw Error(ErrorKind::kNonCovering, "relation misses a point");
  }
  double dis = 0;
  for (std::size_t a = 0; a < relation.size(); ++a) {
    for (std::size_t b = a + 1; b < relation.size(); ++b) {
      const auto [x1, y1] = relation[a];
      const auto [x2, y2] = relation[b];
      dis = std::max(dis, std::abs(dx[x1][x2] - dy[y1][y2]));
    }
  }
  return dis;
}

Correspondence make_correspondence(DistanceMatrix dx, DistanceMatrix dy,
                                   std::vector<std::pair<std::size_t, std::size_t>> relation) {
  Correspondence c{std::move(dx), std::move(dy), std::move(relation), 0.0};
  c.distortion = correspondence_distortion(c.dx, c.dy, c.relation);
  return c;
}

const char* to_string(MatchMethod m) {
  switch (m) {
    case MatchMethod::kExactBijection: return "exact-bijection";
    case MatchMethod::kGreedy: return "greedy";
    case MatchMethod::kProvidedMap: return "provided-map";
  }
  return "?";
}

namespace {

using Relation = std::vector<std::pair<std::size_t, std::size_t>>;

Relation exact_bijection(const DistanceMatrix& dx, const DistanceMatrix& dy) {
  const std::size_t n = dx.size();
  if (n > kMaxExactNet || dy.size() > kMaxExactNet) {
    throw Error(ErrorKind::kNetTooLarge, "exact bijection search is limited to 8-point nets; use greedy");
  }
  if (dy.size() != n) throw Error(ErrorKind::kNetTooLarge, "exact bijection needs nets of equal size; use greedy");
  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_dis = kInf;
  do {
    double dis = 0;
    for (std::size_t a = 0; a < n && dis < best_dis; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) dis = std::max(dis, std::abs(dx[a][b] - dy[perm[a]][perm[b]]));
    }
    if (dis < best_dis) {
      best_dis = dis;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  Relation rel;
  for (std::size_t i = 0; i < n; ++i) rel.push_back({i, best[i]});
  return rel;
}

/// Anchored greedy matching: fixes the image of the first point, then places
/// every further point where it best agrees with the first few placed ones.
Relation greedy_relation(const DistanceMatrix& dx, const DistanceMatrix& dy) {
  constexpr std::size_t kAnchors = 8;
  constexpr std::size_t kLandmarks = 24;
  const std::size_t n = dx.size(), m = dy.size();
  Relation best;
  double best_dis = kInf;
  for (std::size_t anchor = 0; anchor < std::min(m, kAnchors); ++anchor) {
    std::vector<std::size_t> f(n);
    f[0] = anchor;
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t L = std::min(i, kLandmarks);
      double bv = kInf;
      for (std::size_t y = 0; y < m; ++y) {
        double v = 0;
        for (std::size_t j = 0; j < L && v < bv; ++j) v = std::max(v, std::abs(dx[i][j] - dy[y][f[j]]));
        if (v < bv) {
          bv = v;
          f[i] = y;
        }
      }
    }
    Relation rel;
    std::vector<char> hit(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      rel.push_back({i, f[i]});
      hit[f[i]] = 1;
    }
    const std::size_t L = std::min(n, kLandmarks);
    for (std::size_t y = 0; y < m; ++y) {
      if (hit[y]) continue;
      double bv = kInf;
      std::size_t bx = 0;
      for (std::size_t x = 0; x < n; ++x) {
        double v = 0;
        for (std::size_t j = 0; j < L && v < bv; ++j) v = std::max(v, std::abs(dx[x][j] - dy[y][f[j]]));
        if (v < bv) {
          bv = v;
          bx = x;
        }
      }
      rel.push_back({bx, y});
    }
    const double dis = correspondence_distortion(dx, dy, rel);
    if (dis < best_dis) {
      best_dis = dis;
      best = std::move(rel);
    }
  }
  return best;
}

/// Covering radius of a point set over the probe set of its space.
double covering_radius(const NetSample& net, double density) {
  const auto probes = probe_set(*net.space, density);
  std::vector<double> gap(probes.size(), kInf);
  parallel_chunks(probes.size(), 16, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      for (const auto& p : net.points) gap[i] = std::min(gap[i], net.space->distance(probes[i], p));
    }
  });
  return probes.empty() ? 0.0 : *std::max_element(gap.begin(), gap.end());
}

}  // namespace

GhBound gh_upper_bound(const SpaceHandle& x, const SpaceHandle& y, double r, const GhOptions& opts) {
  if (!(r > 0)) throw Error(ErrorKind::kInvalidArgument, "net radius must be positive");
  const double density = opts.density.value_or(r / 4);
  GhBound out;
  out.method = opts.method;
  out.r = r;
  out.net_x = build_net(x, r, density);
  Relation rel;
  if (opts.method == MatchMethod::kProvidedMap) {
    if (!opts.map) throw Error(ErrorKind::kInvalidArgument, "provided-map method needs a map");
    out.net_y = NetSample{y, {}, r, 0.0};
    for (std::size_t i = 0; i < out.net_x.points.size(); ++i) {
      const SpacePoint q = y->canonical(opts.map(out.net_x.points[i]));
      std::size_t j = 0;
      while (j < out.net_y.points.size() && !y->same_point(out.net_y.points[j], q)) ++j;
      if (j == out.net_y.points.size()) out.net_y.points.push_back(q);
      rel.push_back({i, j});
    }
    out.net_y.achieved = covering_radius(out.net_y, density);
  } else {
    out.net_y = build_net(y, r, density);
  }
  DistanceMatrix dx = distance_matrix(out.net_x);
  DistanceMatrix dy = distance_matrix(out.net_y);
  if (opts.method == MatchMethod::kExactBijection) rel = exact_bijection(dx, dy);
  if (opts.method == MatchMethod::kGreedy) rel = greedy_relation(dx, dy);
  out.correspondence = make_correspondence(std::move(dx), std::move(dy), std::move(rel));
  const double rx = std::max(r, out.net_x.achieved);
  const double ry = std::max(r, out.net_y.achieved);
  out.bound = 2 * std::max(rx, ry) + out.correspondence.distortion;
  out.sharp_bound = out.net_x.achieved + out.net_y.achieved + out.correspondence.distortion / 2;
  return out;
}

double mesh_vertex_distortion(const MeshSurface& a, const MeshSurface& b) {
  const std::size_t n = a.vertices().size();
  if (b.vertices().size() != n) throw Error(ErrorKind::kInvalidArgument, "meshes differ in vertex count");
  std::vector<double> worst(n, 0.0);
  parallel_chunks(n, n, [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t v = lo; v < hi; ++v) {
      const auto da = a.distances_from(a.vertex_point(v));
      const auto db = b.distances_from(b.vertex_point(v));
      for (std::size_t w = 0; w < n; ++w) worst[v] = std::max(worst[v], std::abs(da[w] - db[w]));
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

SpaceFamily torus_collapse_family(double gh_r) {
  SpaceFamily f;
  f.label = "torus-collapse";
  f.member = [](double j) {
    if (!(j > 0)) throw Error(ErrorKind::kInvalidArgument, "torus-collapse parameters must be positive");
    return make_torus({kPi, kPi / j});
  };
  f.limit = make_circle(kPi);
  const SpaceHandle limit = f.limit;
  f.gh_bound = [limit, gh_r](double j) -> std::optional<double> {
    GhOptions o;
    o.method = MatchMethod::kProvidedMap;
    o.map = [](const SpacePoint& p) -> SpacePoint { return CirclePoint{std::get<TorusPoint>(p).s[0]}; };
    return gh_upper_bound(make_torus({kPi, kPi / j}), limit, gh_r, o).bound;
  };
  return f;
}

SpaceFamily constant_family(SpaceHandle space) {
  SpaceFamily f;
  f.label = "constant";
  f.member = [space](double) { return space; };
  f.limit = space;
  f.gh_bound = [](double) -> std::optional<double> { return 0.0; };
  return f;
}

SpaceFamily ellipsoid_flatten_family(int ring, int bands, int steiner) {
  SpaceFamily f;
  f.label = "ellipsoid-flatten";
  f.member = [=](double c) { return make_mesh(ellipsoid_mesh(c, ring, bands, steiner), "ellipsoid"); };
  f.limit = make_mesh(ellipsoid_mesh(0.0, ring, bands, steiner), "doubled-disk");
  const SpaceHandle limit = f.limit;
  // The vertex bijection realizes (x, y, z) -> (x, y, sgn z); vertices cover
  // each mesh within its longest edge.
  f.gh_bound = [=](double c) -> std::optional<double> {
    const auto m = ellipsoid_mesh(c, ring, bands, steiner);
    const auto& d = *limit->as<MeshSurface>();
    return 2 * std::max(m.max_edge_length(), d.max_edge_length()) + mesh_vertex_distortion(m, d);
  };
  return f;
}

const char* to_string(Inclusion v) {
  switch (v) {
    case Inclusion::kHolds: return "holds";
    case Inclusion::kFails: return "fails";
    case Inclusion::kInconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

Spectrum member_spectrum(const SpaceHandle& s, int k, double R) {
  const CheckOptions opts = s->as<MeshSurface>() ? mesh_check_options() : CheckOptions{};
  return spectrum_1_over_k(s, k, R, opts);
}

}  // namespace

ConvergenceReport convergence_experiment(const SpaceFamily& family, const std::vector<double>& params, int k,
                                         double R, double eps, bool with_gh, int seed_k_max) {
  if (params.empty()) throw Error(ErrorKind::kEmptyInput, "no family members given");
  if (!(eps > 0) || !(R > 0)) throw Error(ErrorKind::kInvalidArgument, "R and eps must be positive");
  ConvergenceReport rep;
  rep.label = family.label;
  rep.k = k;
  rep.R = R;
  rep.eps = eps;
  rep.limit_lengths = member_spectrum(family.limit, k, R).lengths();
  std::vector<double> limit0 = rep.limit_lengths;
  limit0.push_back(0.0);
  std::sort(limit0.begin(), limit0.end());

  rep.members.resize(params.size());
  parallel_chunks(params.size(), params.size(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      ConvergenceMember& m = rep.members[i];
      m.param = params[i];
      const SpaceHandle s = family.member(params[i]);
      m.spectrum = member_spectrum(s, k, R);
      if (with_gh && family.gh_bound) m.gh_bound = family.gh_bound(params[i]);
      std::vector<double> lens = m.spectrum.lengths();
      for (double l : lens) {
        if (nearest(l, limit0) > eps) m.outside.push_back(l);
      }
      lens.push_back(0.0);
      m.hausdorff = hausdorff_distance_reals(lens, limit0);
      if (!m.outside.empty()) {
        m.inclusion = Inclusion::kFails;
      } else if (!m.spectrum.undecided.empty()) {
        m.inclusion = Inclusion::kInconclusive;
      }
      if (const auto* mesh = s->as<MeshSurface>(); mesh && !mesh->seed_cycles().empty()) {
        const ClosedCurve seed = mesh_vertex_cycle(s, mesh->seed_cycles().front());
        m.seed_minind = minimizing_index(seed, seed_k_max, mesh_check_options()).value;
        for (double l : m.spectrum.lengths()) {
          if (std::abs(l - seed.length()) <= kEpsLen * (1 + l)) m.seed_in_spectrum = true;
        }
      }
    }
  });
  rep.strictly_decreasing = rep.non_increasing = true;
  for (std::size_t i = 1; i < rep.members.size(); ++i) {
    const double prev = rep.members[i - 1].hausdorff, cur = rep.members[i].hausdorff;
    if (!(cur < prev - kEpsLen)) rep.strictly_decreasing = false;
    if (cur > prev + kEpsLen) rep.non_increasing = false;
  }
  return rep;
}

const char* to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::kGap: return "gap";
    case GapVerdict::kOccupied: return "occupied";
    case GapVerdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

GapResult gap_check(const Spectrum& spectrum, double a, double b, double eps) {
  if (a > b) throw Error(ErrorKind::kInvalidArgument, "gap interval needs a <= b");
  GapResult out;
  const double lo = a + eps, hi = b - eps;
  if (lo > hi) return out;
  for (const auto& e : spectrum.entries) {
    if (e.length >= lo && e.length <= hi) out.occupied.push_back(e);
  }
  for (const auto& e : spectrum.undecided) {
    if (e.length >= lo && e.length <= hi) out.undecided.push_back(e);
  }
  if (!out.occupied.empty()) {
    out.verdict = GapVerdict::kOccupied;
  } else if (!out.undecided.empty()) {
    out.verdict = GapVerdict::kInconclusive;
  }
  return out;
}

}  // namespace lsl
