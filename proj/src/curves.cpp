#include "lsl/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "lsl/parallel.hpp"

namespace lsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double wrap(double s, double c) {
  double r = std::fmod(s, c);
  if (r < 0) r += c;
  if (r >= c) r -= c;
  return r;
}

SpacePoint run_point(const LengthSpace& space, const Run& run, double x) {
  return std::visit(
      Overloaded{
          [&](const CircleRun& r) -> SpacePoint {
            return CirclePoint{wrap(r.start + (r.delta < 0 ? -x : x), space.as<Circle>()->circumference())};
          },
          [&](const TorusRun& r) -> SpacePoint {
            const auto* t = space.as<FlatTorus>();
            const double len = norm(r.delta);
            TorusPoint p;
            for (std::size_t i = 0; i < r.start.size(); ++i) {
              p.s.push_back(wrap(r.start[i] + r.delta[i] * (x / len), t->factor(i).circumference()));
            }
            return p;
          },
          [&](const SphereRun& r) -> SpacePoint {
            SpherePoint p{std::vector<double>(r.start.size())};
            const double c = std::cos(x), s = std::sin(x);
            for (std::size_t i = 0; i < r.start.size(); ++i) p.x[i] = c * r.start[i] + s * r.dir[i];
            return p;
          },
          [&](const GraphRun& r) -> SpacePoint {
            const double off = r.to >= r.from ? r.from + x : r.from - x;
            return space.as<MetricGraph>()->canonical(GraphPoint::on_edge(r.edge, off));
          },
          [&](const MeshRun& r) -> SpacePoint {
            const double u = r.length > 0 ? x / r.length : 0.0;
            MeshPoint p{r.face, {}};
            for (int i = 0; i < 3; ++i) p.bary[i] = (1 - u) * r.from[i] + u * r.to[i];
            return p;
          },
      },
      run);
}

bool run_matches(const LengthSpace& space, const Run& run) {
  return std::visit(Overloaded{
                        [&](const CircleRun&) { return space.as<Circle>() != nullptr; },
                        [&](const TorusRun& r) {
                          const auto* t = space.as<FlatTorus>();
                          return t && r.start.size() == t->dimension() && r.delta.size() == t->dimension();
                        },
                        [&](const SphereRun& r) {
                          const auto* s = space.as<RoundSphere>();
                          return s && r.start.size() == static_cast<std::size_t>(s->dimension() + 1) &&
                                 r.dir.size() == r.start.size();
                        },
                        [&](const GraphRun& r) {
                          const auto* g = space.as<MetricGraph>();
                          return g && r.edge < g->edges().size();
                        },
                        [&](const MeshRun& r) {
                          const auto* m = space.as<MeshSurface>();
                          return m && r.face < m->faces().size();
                        },
                    },
                    run);
}

int run_direction(const GraphRun& r) { return r.to >= r.from ? +1 : -1; }

}  // namespace

double run_length(const Run& run) {
  return std::visit(Overloaded{
                        [](const CircleRun& r) { return std::abs(r.delta); },
                        [](const TorusRun& r) { return norm(r.delta); },
                        [](const SphereRun& r) { return r.angle; },
                        [](const GraphRun& r) { return std::abs(r.to - r.from); },
                        [](const MeshRun& r) { return r.length; },
                    },
                    run);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kViolated: return "violated";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ClosedCurve
// ---------------------------------------------------------------------------

ClosedCurve::ClosedCurve(SpaceHandle space, std::vector<Run> runs) : space_(std::move(space)), runs_(std::move(runs)) {
  if (!space_) throw Error(ErrorKind::kInvalidArgument, "curve needs a space");
  if (runs_.empty()) throw Error(ErrorKind::kInvalidArgument, "curve needs at least one run");
  for (const auto& r : runs_) {
    if (!run_matches(*space_, r)) throw Error(ErrorKind::kMismatchedVariant, "run does not match the space");
    const double len = run_length(r);
    if (!(len > 0.0) || !std::isfinite(len)) throw Error(ErrorKind::kInvalidArgument, "runs must have positive length");
    if (const auto* sr = std::get_if<SphereRun>(&r); sr && sr->angle >= kPi) {
      throw Error(ErrorKind::kInvalidArgument, "sphere run is not minimal");
    }
    prefix_.push_back(length_);
    length_ += len;
  }
  const double tol = 1e-9 * (1.0 + length_);
  const bool exact = space_->exact_oracle();
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    const double len = run_length(runs_[i]);
    const SpacePoint end = run_point(*space_, runs_[i], len);
    const SpacePoint next = run_point(*space_, runs_[(i + 1) % runs_.size()], 0.0);
    const bool joined = exact ? space_->distance(end, next) <= tol : space_->same_point(end, next);
    if (!joined) throw Error(ErrorKind::kInvalidArgument, "runs do not form a closed chain");
    if (exact) {
      const double d = space_->distance(run_point(*space_, runs_[i], 0.0), end);
      if (std::abs(d - len) > 1e-9 * (1.0 + len)) {
        throw Error(ErrorKind::kInvalidArgument, "run is not a minimal segment");
      }
    }
  }
  if (space_->as<MeshSurface>()) cache_ = std::make_shared<FieldCache>();
}

struct ClosedCurve::FieldCache {
  static constexpr std::size_t kMaxFields = 4096;
  std::mutex mu;
  std::map<double, std::shared_ptr<const MeshSurface::DistanceField>> fields;
};

double ClosedCurve::window_distance(double s, double w) const {
  const SpacePoint q = at_arclength(s + w);
  if (!cache_) return space_->distance(at_arclength(s), q);
  const auto& mesh = *space_->as<MeshSurface>();
  const double key = wrap(s, length_);
  std::shared_ptr<const MeshSurface::DistanceField> field;
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->fields.find(key);
    if (it != cache_->fields.end()) field = it->second;
  }
  if (!field) {
    field = std::make_shared<const MeshSurface::DistanceField>(
        mesh.field_from(std::get<MeshPoint>(at_arclength(key))));
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->fields.size() < FieldCache::kMaxFields) cache_->fields.emplace(key, field);
  }
  return mesh.distance_via(*field, std::get<MeshPoint>(q));
}

double ClosedCurve::min_run_length() const {
  double m = kInf;
  for (const auto& r : runs_) m = std::min(m, run_length(r));
  return m;
}

std::size_t ClosedCurve::run_at(double s) const {
  s = wrap(s, length_);
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), s);
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - prefix_.begin()) - 1));
}

SpacePoint ClosedCurve::at_arclength(double s) const {
  s = wrap(s, length_);
  const std::size_t i = run_at(s);
  const double x = std::clamp(s - prefix_[i], 0.0, run_length(runs_[i]));
  return run_point(*space_, runs_[i], x);
}

std::vector<SpacePoint> ClosedCurve::breakpoints() const {
  std::vector<SpacePoint> out;
  for (const auto& r : runs_) out.push_back(run_point(*space_, r, 0.0));
  return out;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

ClosedCurve circle_loop(const SpaceHandle& space, int winding, double start) {
  const auto* c = space->as<Circle>();
  if (!c) throw Error(ErrorKind::kMismatchedVariant, "circle_loop needs a circle");
  if (winding == 0) throw Error(ErrorKind::kInvalidArgument, "winding must be nonzero");
  const int pieces = 4 * std::abs(winding);
  const double step = (winding > 0 ? 1.0 : -1.0) * c->circumference() / 4;
  std::vector<Run> runs;
  for (int i = 0; i < pieces; ++i) runs.push_back(CircleRun{wrap(start + i * step, c->circumference()), step});
  return ClosedCurve(space, std::move(runs));
}

ClosedCurve torus_geodesic(const SpaceHandle& space, const std::vector<long>& lattice, std::optional<TorusPoint> start) {
  const auto* t = space->as<FlatTorus>();
  if (!t) throw Error(ErrorKind::kMismatchedVariant, "torus_geodesic needs a flat torus");
  if (lattice.size() != t->dimension()) throw Error(ErrorKind::kInvalidArgument, "lattice vector has wrong dimension");
  TorusPoint p0 = start.value_or(TorusPoint{std::vector<double>(t->dimension(), 0.0)});
  if (p0.s.size() != t->dimension()) throw Error(ErrorKind::kMismatchedVariant, "start point has wrong dimension");
  std::vector<double> total(t->dimension());
  long pieces = 0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    total[i] = static_cast<double>(lattice[i]) * t->factor(i).circumference();
    pieces = std::max(pieces, 4 * std::labs(lattice[i]));
  }
  if (pieces == 0) throw Error(ErrorKind::kInvalidArgument, "lattice vector must be nonzero");
  std::vector<Run> runs;
  for (long j = 0; j < pieces; ++j) {
    TorusRun r;
    for (std::size_t i = 0; i < total.size(); ++i) {
      r.start.push_back(wrap(p0.s[i] + total[i] * static_cast<double>(j) / pieces, t->factor(i).circumference()));
      r.delta.push_back(total[i] / pieces);
    }
    runs.push_back(std::move(r));
  }
  return ClosedCurve(space, std::move(runs));
}

ClosedCurve great_circle(const SpaceHandle& space, const SpherePoint& start, const Tangent& dir, int turns) {
  const auto* s = space->as<RoundSphere>();
  if (!s) throw Error(ErrorKind::kMismatchedVariant, "great_circle needs a sphere");
  if (turns < 1) throw Error(ErrorKind::kInvalidArgument, "turns must be positive");
  const std::size_t n = static_cast<std::size_t>(s->dimension() + 1);
  if (start.x.size() != n || dir.size() != n) throw Error(ErrorKind::kMismatchedVariant, "wrong ambient dimension");
  std::vector<double> x = start.x;
  const double xn = norm(x);
  for (double& v : x) v /= xn;
  std::vector<double> u = dir;
  double c = 0;
  for (std::size_t i = 0; i < n; ++i) c += u[i] * x[i];
  for (std::size_t i = 0; i < n; ++i) u[i] -= c * x[i];
  const double un = norm(u);
  if (un < 1e-12) throw Error(ErrorKind::kInvalidArgument, "direction is not tangent");
  for (double& v : u) v /= un;
  std::vector<Run> runs;
  for (int j = 0; j < 4 * turns; ++j) {
    const double a = kPi / 2 * j;
    SphereRun r{std::vector<double>(n), std::vector<double>(n), kPi / 2};
    for (std::size_t i = 0; i < n; ++i) {
      r.start[i] = std::cos(a) * x[i] + std::sin(a) * u[i];
      r.dir[i] = -std::sin(a) * x[i] + std::cos(a) * u[i];
    }
    runs.push_back(std::move(r));
  }
  return ClosedCurve(space, std::move(runs));
}

ClosedCurve graph_walk(const SpaceHandle& space, const std::vector<DirectedEdge>& walk) {
  const auto* g = space->as<MetricGraph>();
  if (!g) throw Error(ErrorKind::kMismatchedVariant, "graph_walk needs a metric graph");
  if (walk.empty()) throw Error(ErrorKind::kInvalidArgument, "walk is empty");
  std::vector<Run> runs;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const auto& de = walk[i];
    if (de.edge >= g->edges().size() || (de.dir != 1 && de.dir != -1)) {
      throw Error(ErrorKind::kInvalidArgument, "bad directed edge in walk");
    }
    const auto& ed = g->edge(de.edge);
    const auto& nx = walk[(i + 1) % walk.size()];
    const std::size_t head = de.dir > 0 ? ed.b : ed.a;
    const auto& ned = g->edge(nx.edge);
    const std::size_t tail = nx.dir > 0 ? ned.a : ned.b;
    if (head != tail) throw Error(ErrorKind::kInvalidArgument, "walk is not closed and connected");
    const double half = ed.length / 2;
    if (de.dir > 0) {
      runs.push_back(GraphRun{de.edge, 0.0, half});
      runs.push_back(GraphRun{de.edge, half, ed.length});
    } else {
      runs.push_back(GraphRun{de.edge, ed.length, half});
      runs.push_back(GraphRun{de.edge, half, 0.0});
    }
  }
  return ClosedCurve(space, std::move(runs));
}

ClosedCurve mesh_vertex_cycle(const SpaceHandle& space, const std::vector<std::size_t>& cycle) {
  const auto* m = space->as<MeshSurface>();
  if (!m) throw Error(ErrorKind::kMismatchedVariant, "mesh_vertex_cycle needs a mesh");
  if (cycle.size() < 2) throw Error(ErrorKind::kInvalidArgument, "cycle needs at least two vertices");
  std::vector<Run> runs;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const std::size_t u = cycle[i], v = cycle[(i + 1) % cycle.size()];
    bool found = false;
    for (std::size_t f = 0; f < m->faces().size() && !found; ++f) {
      const auto& tri = m->faces()[f];
      int iu = -1, iv = -1;
      for (int c = 0; c < 3; ++c) {
        if (tri[c] == u) iu = c;
        if (tri[c] == v) iv = c;
      }
      if (iu < 0 || iv < 0 || iu == iv) continue;
      MeshRun r{f, {0, 0, 0}, {0, 0, 0}, 0.0};
      r.from[iu] = 1.0;
      r.to[iv] = 1.0;
      const auto& a = m->vertices()[u];
      const auto& b = m->vertices()[v];
      r.length = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
      runs.push_back(r);
      found = true;
    }
    if (!found) throw Error(ErrorKind::kInvalidArgument, "consecutive cycle vertices are not adjacent");
  }
  return ClosedCurve(space, std::move(runs));
}

namespace {

struct Port {
  std::size_t vertex;
  double cost;
  std::optional<GraphRun> run;
};

/// Ways to leave p (or, with `into`, to arrive at p) through a vertex.
std::vector<Port> ports(const MetricGraph& g, const GraphPoint& p, bool into) {
  if (p.is_vertex()) return {{p.vertex, 0.0, std::nullopt}};
  const GraphEdge& e = g.edge(p.edge);
  auto run = [&](double end) { return into ? GraphRun{p.edge, end, p.offset} : GraphRun{p.edge, p.offset, end}; };
  return {{e.a, p.offset, run(0.0)}, {e.b, e.length - p.offset, run(e.length)}};
}

/// Runs of the unique minimal segment from p to q; kAmbiguousDirection on ties.
std::vector<GraphRun> graph_segment(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
  struct Route {
    double cost = 0.0;
    std::vector<GraphRun> runs;
    /// Some vertex on the way has two shortest continuations.
    bool forks = false;
  };
  std::vector<Route> routes;
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge)
    routes.push_back({std::abs(p.offset - q.offset), {{p.edge, p.offset, q.offset}}, false});
  for (const auto& out : ports(g, p, false)) {
    for (const auto& in : ports(g, q, true)) {
      Route r{out.cost + g.vertex_distance(out.vertex, in.vertex) + in.cost, {}, false};
      if (out.run) r.runs.push_back(*out.run);
      std::size_t u = out.vertex;
      while (u != in.vertex) {
        const double rest = g.vertex_distance(u, in.vertex);
        std::optional<std::pair<std::size_t, int>> next;
        for (auto [e, dir] : g.incidence()[u]) {
          const GraphEdge& ed = g.edge(e);
          const std::size_t w = dir > 0 ? ed.b : ed.a;
          if (std::abs(ed.length + g.vertex_distance(w, in.vertex) - rest) > kEpsLen) continue;
          if (next) r.forks = true;
          else next = {e, dir};
        }
        const GraphEdge& ed = g.edge(next->first);
        r.runs.push_back(next->second > 0 ? GraphRun{next->first, 0.0, ed.length} : GraphRun{next->first, ed.length, 0.0});
        u = next->second > 0 ? ed.b : ed.a;
      }
      if (in.run) r.runs.push_back(*in.run);
      routes.push_back(std::move(r));
    }
  }
  double best = kInf;
  for (const auto& r : routes) best = std::min(best, r.cost);
  const Route* pick = nullptr;
  int count = 0;
  for (const auto& r : routes) {
    if (r.cost > best + kEpsLen) continue;
    ++count;
    if (r.forks) ++count;
    pick = &r;
  }
  if (count != 1) throw Error(ErrorKind::kAmbiguousDirection, "graph points joined by several minimal segments");
  std::vector<GraphRun> out;
  for (const auto& run : pick->runs)
    if (run.to != run.from) out.push_back(run);
  return out;
}

}  // namespace

ClosedCurve curve_from_breakpoints(const SpaceHandle& space, const std::vector<SpacePoint>& points,
                                   const std::vector<std::optional<Tangent>>& witnesses) {
  if (points.size() < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two breakpoints");
  if (!witnesses.empty() && witnesses.size() != points.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one witness slot per segment expected");
  }
  std::vector<Run> runs;
  const std::size_t n = points.size();
  if (const auto* m = space->as<MeshSurface>()) {
    for (std::size_t i = 0; i < n; ++i) {
      space->check_point(points[i]);
      for (const auto& piece : m->shortest_path(std::get<MeshPoint>(points[i]), std::get<MeshPoint>(points[(i + 1) % n]))) {
        if (piece.length > 0) runs.push_back(MeshRun{piece.face, piece.from, piece.to, piece.length});
      }
    }
    return ClosedCurve(space, std::move(runs));
  }
  if (const auto* g = space->as<MetricGraph>()) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = std::get<GraphPoint>(space->canonical(points[i]));
      const auto q = std::get<GraphPoint>(space->canonical(points[(i + 1) % n]));
      const auto seg = graph_segment(*g, p, q);
      runs.insert(runs.end(), seg.begin(), seg.end());
    }
    return ClosedCurve(space, std::move(runs));
  }
  if (space->as<FiniteMetric>()) {
    throw Error(ErrorKind::kUnsupportedVariant, "no curves on a finite metric space");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const SpacePoint p = space->canonical(points[i]);
    const SpacePoint q = space->canonical(points[(i + 1) % n]);
    Tangent v;
    if (!witnesses.empty() && witnesses[i]) {
      v = *witnesses[i];
      if (std::abs(norm(v) - space->distance(p, q)) > 1e-9 * (1 + norm(v))) {
        throw Error(ErrorKind::kInvalidArgument, "witness is not a minimal segment");
      }
    } else {
      v = log_map(*space, p, q);
    }
    const double len = norm(v);
    if (len <= kEpsLen) continue;
    if (space->as<Circle>()) {
      runs.push_back(CircleRun{std::get<CirclePoint>(p).s, v[0]});
    } else if (space->as<FlatTorus>()) {
      runs.push_back(TorusRun{std::get<TorusPoint>(p).s, v});
    } else {
      Tangent dir = v;
      for (double& x : dir) x /= len;
      runs.push_back(SphereRun{std::get<SpherePoint>(p).x, dir, len});
    }
  }
  return ClosedCurve(space, std::move(runs));
}

ClosedCurve iterate(const ClosedCurve& curve, int n) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "iteration count must be positive");
  std::vector<Run> runs;
  for (int i = 0; i < n; ++i) runs.insert(runs.end(), curve.runs().begin(), curve.runs().end());
  return ClosedCurve(curve.space(), std::move(runs));
}

// ---------------------------------------------------------------------------
// Window checks
// ---------------------------------------------------------------------------

namespace {

struct Minimum {
  double g = kInf;
  double s = 0.0;
};

double upper_slack(const ClosedCurve& c) { return 1e-9 * (1.0 + c.length()); }

double window_distance(const ClosedCurve& c, double s, double w) {
  const double g = c.window_distance(s, w);
  if (g > w + upper_slack(c)) {
    throw Error(ErrorKind::kInvalidArgument, "distance exceeds arclength; curve runs are inconsistent");
  }
  return g;
}

Minimum min_over(const ClosedCurve& c, const std::vector<double>& samples, double w) {
  const std::size_t chunks = std::min<std::size_t>(samples.size(), 64);
  std::vector<Minimum> local(chunks);
  parallel_chunks(samples.size(), chunks, [&](std::size_t b, std::size_t e, std::size_t k) {
    Minimum m;
    for (std::size_t i = b; i < e; ++i) {
      const double g = window_distance(c, samples[i], w);
      if (g < m.g) m = {g, samples[i]};
    }
    local[k] = m;
  });
  Minimum best;
  for (const auto& m : local) {
    if (m.g < best.g) best = m;
  }
  return best;
}

std::vector<double> breakpoint_samples(const ClosedCurve& c, double w) {
  std::vector<double> out;
  const double L = c.length();
  for (std::size_t i = 0; i < c.num_runs(); ++i) {
    out.push_back(c.run_start(i));
    out.push_back(wrap(c.run_start(i) - w, L));
  }
  return out;
}

/// Exact minimum of g on a metric graph: g is the minimum of functions linear
/// between consecutive run boundaries of s and s + w, except for the |x - y|
/// term when both points share an edge, which has one kink where they meet.
Minimum graph_exact_minimum(const ClosedCurve& c, double w) {
  const double L = c.length();
  std::vector<double> bps = breakpoint_samples(c, w);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  std::vector<double> cand = bps;
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const double a = bps[i];
    const double b = i + 1 < bps.size() ? bps[i + 1] : bps[0] + L;
    if (!(b > a)) continue;
    const double m = (a + b) / 2;
    const std::size_t r1 = c.run_at(m);
    const std::size_t r2 = c.run_at(m + w);
    const auto& g1 = std::get<GraphRun>(c.runs()[r1]);
    const auto& g2 = std::get<GraphRun>(c.runs()[r2]);
    if (g1.edge != g2.edge) continue;
    const int s1 = run_direction(g1);
    if (s1 == run_direction(g2)) continue;
    const double S1 = c.run_start(r1) + L * std::floor(m / L);
    const double S2 = c.run_start(r2) + L * std::floor((m + w) / L);
    const double s = (g2.from - g1.from) / (2.0 * s1) + (S1 + S2 - w) / 2.0;
    if (s > a && s < b) cand.push_back(wrap(s, L));
  }
  return min_over(c, cand, w);
}

}  // namespace

WindowCheck check_window(const ClosedCurve& curve, double w, const CheckOptions& opts) {
  const double L = curve.length();
  if (!(w > 0.0) || !(w < L)) throw Error(ErrorKind::kInvalidArgument, "window must lie in (0, L)");
  WindowCheck out;
  if (curve.space()->as<MetricGraph>()) {
    const Minimum m = graph_exact_minimum(curve, w);
    out.margin = w - m.g;
    out.t_star = m.s / L * kTwoPi;
    out.verdict = out.margin <= kEpsLen ? Verdict::kHolds : Verdict::kViolated;
    return out;
  }
  if (!(opts.delta > 0.0) || !(opts.delta_floor > 0.0)) throw Error(ErrorKind::kInvalidArgument, "grid step must be positive");
  const double hold_tol = curve.space()->hold_tolerance();
  const std::vector<double> extra = breakpoint_samples(curve, w);
  for (double delta = opts.delta;; delta /= 2) {
    const std::size_t n = static_cast<std::size_t>(std::ceil(kTwoPi / delta - 1e-9));
    std::vector<double> samples = extra;
    for (std::size_t i = 0; i < n; ++i) samples.push_back(L * static_cast<double>(i) / static_cast<double>(n));
    const Minimum m = min_over(curve, samples, w);
    out.margin = w - m.g;
    out.t_star = m.s / L * kTwoPi;
    out.tol_cert = L / kPi * delta;
    out.delta_used = delta;
    if (out.margin <= hold_tol) {
      out.verdict = Verdict::kHolds;
      return out;
    }
    if (out.margin > out.tol_cert) {
      out.verdict = Verdict::kViolated;
      return out;
    }
    if (delta / 2 < opts.delta_floor * (1 - 1e-12)) {
      out.verdict = Verdict::kInconclusive;
      return out;
    }
  }
}

WindowCheck check_one_over_k(const ClosedCurve& curve, int k, const CheckOptions& opts) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  return check_window(curve, curve.length() / k, opts);
}

IndexResult minimizing_index(const ClosedCurve& curve, int k_max, const CheckOptions& opts) {
  if (k_max < 2) throw Error(ErrorKind::kInvalidArgument, "k_max must be at least 2");
  IndexResult out;
  for (int k = 2; k <= k_max; ++k) {
    const auto r = check_one_over_k(curve, k, opts);
    if (r.verdict == Verdict::kHolds) {
      out.value = k;
      return out;
    }
    if (r.verdict == Verdict::kInconclusive) out.undecided = true;
  }
  return out;
}

namespace {

/// Fixed-grid predicate used for bisection: no deficit beyond the hold
/// tolerance on the default grid.
bool minimizes_window(const ClosedCurve& curve, double w, const CheckOptions& opts) {
  if (curve.space()->as<MetricGraph>()) return check_window(curve, w, opts).verdict == Verdict::kHolds;
  CheckOptions fixed = opts;
  fixed.delta_floor = opts.delta;
  const auto r = check_window(curve, w, fixed);
  return r.margin <= curve.space()->hold_tolerance();
}

double cert_slack(const ClosedCurve& curve, const CheckOptions& opts) {
  return curve.space()->as<MetricGraph>() ? kEpsLen : curve.length() / kPi * opts.delta;
}

}  // namespace

InjradResult curve_injrad(const ClosedCurve& curve, const CheckOptions& opts) {
  const double L = curve.length();
  InjradResult out;
  out.error = cert_slack(curve, opts);
  double lo = 0.0, hi = L / 2;
  if (minimizes_window(curve, hi, opts)) {
    out.value = hi;
    return out;
  }
  const double resolution = curve.space()->as<MetricGraph>() ? 1e-13 * (1 + L) : 1e-3 * out.error;
  for (int it = 0; it < 200 && hi - lo > resolution; ++it) {
    const double mid = (lo + hi) / 2;
    if (minimizes_window(curve, mid, opts)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.value = (lo + hi) / 2;
  return out;
}

namespace {

IndexResult open_index_from(const ClosedCurve& curve, const IndexResult& minind, const InjradResult& rho,
                            int k_max, const CheckOptions& opts) {
  IndexResult out;
  out.undecided = minind.undecided;
  if (!minind.value) return out;
  const double slack = cert_slack(curve, opts);
  for (int k = std::max(3, *minind.value); k <= k_max; ++k) {
    if (rho.value > curve.length() / k + slack) {
      out.value = k;
      return out;
    }
  }
  return out;
}

}  // namespace

bool is_openly(const ClosedCurve& curve, int k, const CheckOptions& opts) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  if (check_one_over_k(curve, k, opts).verdict != Verdict::kHolds) return false;
  return curve_injrad(curve, opts).value > curve.length() / k + cert_slack(curve, opts);
}

IndexResult open_index(const ClosedCurve& curve, int k_max, const CheckOptions& opts) {
  const IndexResult minind = minimizing_index(curve, k_max, opts);
  if (!minind.value) return minind;
  return open_index_from(curve, minind, curve_injrad(curve, opts), k_max, opts);
}

bool is_closed_geodesic(const ClosedCurve& curve, const CheckOptions& opts) {
  const double L = curve.length();
  const int k = std::max(2, static_cast<int>(std::ceil(L / curve.min_run_length() - 1e-12)));
  return check_one_over_k(curve, k, opts).verdict == Verdict::kHolds;
}

CurveReport analyze_curve(const ClosedCurve& curve, int k_max, const CheckOptions& opts) {
  if (k_max < 2) throw Error(ErrorKind::kInvalidArgument, "k_max must be at least 2");
  CurveReport rep;
  rep.length = curve.length();
  for (int k = 2; k <= k_max; ++k) {
    const auto r = check_one_over_k(curve, k, opts);
    rep.margins.push_back({k, r.margin});
    if (r.verdict == Verdict::kHolds && !rep.minind.value) rep.minind.value = k;
    if (r.verdict == Verdict::kInconclusive && !rep.minind.value) rep.minind.undecided = true;
  }
  rep.is_geodesic = rep.minind.value.has_value() || is_closed_geodesic(curve, opts);
  rep.injrad = curve_injrad(curve, opts);
  rep.opind = open_index_from(curve, rep.minind, rep.injrad, k_max, opts);
  return rep;
}

}  // namespace lsl
