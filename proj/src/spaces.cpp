#include "lsl/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace lsl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kMismatchedVariant: return "mismatched space variant";
    case ErrorKind::kUnsupportedVariant: return "unsupported space variant";
    case ErrorKind::kAmbiguousDirection: return "ambiguous direction";
    case ErrorKind::kNonsmoothPoint: return "nonsmooth point of E";
    case ErrorKind::kCombinatorialBlowup: return "combinatorial blow-up";
    case ErrorKind::kSystoleUndefined: return "systole undefined";
    case ErrorKind::kEmptyInput: return "empty input";
    case ErrorKind::kNonCovering: return "relation does not cover both sides";
    case ErrorKind::kNetTooLarge: return "net too large for exact search";
    case ErrorKind::kParse: return "parse error";
  }
  return "error";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double wrap(double s, double c) {
  double r = std::fmod(s, c);
  if (r < 0) r += c;
  if (r >= c) r -= c;
  return r;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

[[noreturn]] void mismatch(const LengthSpace& space) {
  throw Error(ErrorKind::kMismatchedVariant, "point does not belong to a " + space.kind_name());
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteMetric
// ---------------------------------------------------------------------------

FiniteMetric::FiniteMetric(std::vector<std::vector<double>> matrix) : d_(std::move(matrix)) {
  const std::size_t n = d_.size();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "finite metric needs at least one point");
  for (const auto& row : d_) {
    if (row.size() != n) throw Error(ErrorKind::kInvalidArgument, "distance matrix is not square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (d_[i][i] != 0.0) throw Error(ErrorKind::kInvalidArgument, "nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(d_[i][j] >= 0.0) || std::abs(d_[i][j] - d_[j][i]) > kEpsLen) {
        throw Error(ErrorKind::kInvalidArgument, "distance matrix is not symmetric and nonnegative");
      }
      if (i != j && d_[i][j] == 0.0) {
        throw Error(ErrorKind::kInvalidArgument, "distinct points at distance zero");
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (d_[i][k] > d_[i][j] + d_[j][k] + kEpsLen) {
          throw Error(ErrorKind::kInvalidArgument, "triangle inequality fails");
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// MetricGraph
// ---------------------------------------------------------------------------

MetricGraph::MetricGraph(std::vector<std::string> vertex_names, std::vector<GraphEdge> edges)
    : names_(std::move(vertex_names)), edges_(std::move(edges)) {
  const std::size_t n = names_.size();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "graph needs at least one vertex");
  incidence_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.a >= n || ed.b >= n) throw Error(ErrorKind::kInvalidArgument, "edge endpoint out of range");
    if (!(ed.length > 0.0) || !std::isfinite(ed.length)) {
      throw Error(ErrorKind::kInvalidArgument, "edge lengths must be positive");
    }
    incidence_[ed.a].push_back({e, +1});
    incidence_[ed.b].push_back({e, -1});
  }

  dist_.assign(n * n, kInf);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    double* d = &dist_[s * n];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[s] = 0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > d[u]) continue;
      for (auto [e, dir] : incidence_[u]) {
        const auto& ed = edges_[e];
        const std::size_t v = dir > 0 ? ed.b : ed.a;
        if (du + ed.length < d[v]) {
          d[v] = du + ed.length;
          pq.push({d[v], v});
        }
      }
    }
  }
  for (double x : dist_) {
    if (!std::isfinite(x)) throw Error(ErrorKind::kInvalidArgument, "metric graph is not connected");
  }
}

GraphPoint MetricGraph::canonical(const GraphPoint& p) const {
  if (p.is_vertex()) {
    if (p.vertex >= names_.size()) throw Error(ErrorKind::kInvalidArgument, "vertex out of range");
    return GraphPoint::at_vertex(p.vertex);
  }
  if (p.edge >= edges_.size()) throw Error(ErrorKind::kInvalidArgument, "edge out of range");
  const auto& ed = edges_[p.edge];
  if (p.offset < -kEpsLen || p.offset > ed.length + kEpsLen) {
    throw Error(ErrorKind::kInvalidArgument, "edge offset out of range");
  }
  if (p.offset <= kEpsLen) return GraphPoint::at_vertex(ed.a);
  if (p.offset >= ed.length - kEpsLen) return GraphPoint::at_vertex(ed.b);
  return p;
}

std::vector<MetricGraph::Anchor> MetricGraph::anchors(const GraphPoint& p) const {
  if (p.is_vertex()) return {{p.vertex, 0.0}};
  const auto& ed = edges_[p.edge];
  return {{ed.a, p.offset}, {ed.b, ed.length - p.offset}};
}

double MetricGraph::distance(const GraphPoint& p0, const GraphPoint& q0) const {
  const GraphPoint p = canonical(p0);
  const GraphPoint q = canonical(q0);
  double best = kInf;
  for (const auto& a : anchors(p)) {
    for (const auto& b : anchors(q)) {
      best = std::min(best, a.dist + vertex_distance(a.vertex, b.vertex) + b.dist);
    }
  }
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) {
    best = std::min(best, std::abs(p.offset - q.offset));
  }
  return best;
}

double MetricGraph::total_length() const {
  double s = 0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

std::optional<std::size_t> MetricGraph::find_vertex(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

// ---------------------------------------------------------------------------
// Circle, FlatTorus, RoundSphere
// ---------------------------------------------------------------------------

Circle::Circle(double diameter) : d_(diameter) {
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw Error(ErrorKind::kInvalidArgument, "circle diameter must be positive");
  }
}

double Circle::displacement(double a, double b) const {
  const double c = circumference();
  double delta = std::fmod(b - a, c);
  if (delta > d_) delta -= c;
  if (delta <= -d_) delta += c;
  return delta;
}

double Circle::distance(double a, double b) const { return std::abs(displacement(a, b)); }

FlatTorus::FlatTorus(std::vector<double> diameters) {
  if (diameters.empty()) throw Error(ErrorKind::kInvalidArgument, "torus needs at least one factor");
  for (double d : diameters) factors_.emplace_back(d);
}

std::vector<double> FlatTorus::diameters() const {
  std::vector<double> out;
  for (const auto& c : factors_) out.push_back(c.diameter());
  return out;
}

double FlatTorus::distance(const TorusPoint& p, const TorusPoint& q) const {
  double s = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const double d = factors_[i].distance(p.s[i], q.s[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

RoundSphere::RoundSphere(int dimension) : n_(dimension) {
  if (dimension < 1) throw Error(ErrorKind::kInvalidArgument, "sphere dimension must be >= 1");
}

double RoundSphere::distance(const SpherePoint& p, const SpherePoint& q) const {
  double s2 = 0, t2 = 0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    s2 += (p.x[i] - q.x[i]) * (p.x[i] - q.x[i]);
    t2 += (p.x[i] + q.x[i]) * (p.x[i] + q.x[i]);
  }
  return 2.0 * std::atan2(std::sqrt(s2), std::sqrt(t2));
}

// ---------------------------------------------------------------------------
// LengthSpace
// ---------------------------------------------------------------------------

LengthSpace::LengthSpace(Variant v, std::string label) : v_(std::move(v)), label_(std::move(label)) {}

std::string LengthSpace::kind_name() const {
  return std::visit(Overloaded{
                        [](const FiniteMetric&) { return std::string("finite metric"); },
                        [](const MetricGraph&) { return std::string("metric graph"); },
                        [](const Circle&) { return std::string("circle"); },
                        [](const FlatTorus&) { return std::string("flat torus"); },
                        [](const RoundSphere&) { return std::string("round sphere"); },
                        [](const MeshSurface&) { return std::string("mesh surface"); },
                    },
                    v_);
}

void LengthSpace::check_point(const SpacePoint& p) const {
  const bool ok = std::visit(
      Overloaded{
          [&](const FiniteMetric& m) {
            auto* fp = std::get_if<FinitePoint>(&p);
            return fp && fp->index < m.size();
          },
          [&](const MetricGraph& g) {
            auto* gp = std::get_if<GraphPoint>(&p);
            if (!gp) return false;
            return gp->is_vertex() ? gp->vertex < g.num_vertices() : gp->edge < g.edges().size();
          },
          [&](const Circle&) { return std::holds_alternative<CirclePoint>(p); },
          [&](const FlatTorus& t) {
            auto* tp = std::get_if<TorusPoint>(&p);
            return tp && tp->s.size() == t.dimension();
          },
          [&](const RoundSphere& s) {
            auto* sp = std::get_if<SpherePoint>(&p);
            return sp && sp->x.size() == static_cast<std::size_t>(s.dimension() + 1);
          },
          [&](const MeshSurface& m) {
            auto* mp = std::get_if<MeshPoint>(&p);
            return mp && mp->face < m.faces().size();
          },
      },
      v_);
  if (!ok) mismatch(*this);
}

double LengthSpace::distance(const SpacePoint& p, const SpacePoint& q) const {
  check_point(p);
  check_point(q);
  return std::visit(
      Overloaded{
          [&](const FiniteMetric& m) {
            return m.distance(std::get<FinitePoint>(p).index, std::get<FinitePoint>(q).index);
          },
          [&](const MetricGraph& g) { return g.distance(std::get<GraphPoint>(p), std::get<GraphPoint>(q)); },
          [&](const Circle& c) { return c.distance(std::get<CirclePoint>(p).s, std::get<CirclePoint>(q).s); },
          [&](const FlatTorus& t) { return t.distance(std::get<TorusPoint>(p), std::get<TorusPoint>(q)); },
          [&](const RoundSphere& s) { return s.distance(std::get<SpherePoint>(p), std::get<SpherePoint>(q)); },
          [&](const MeshSurface& m) { return m.distance(std::get<MeshPoint>(p), std::get<MeshPoint>(q)); },
      },
      v_);
}

SpacePoint LengthSpace::canonical(const SpacePoint& p) const {
  check_point(p);
  return std::visit(Overloaded{
                        [&](const FiniteMetric&) -> SpacePoint { return p; },
                        [&](const MetricGraph& g) -> SpacePoint { return g.canonical(std::get<GraphPoint>(p)); },
                        [&](const Circle& c) -> SpacePoint {
                          return CirclePoint{wrap(std::get<CirclePoint>(p).s, c.circumference())};
                        },
                        [&](const FlatTorus& t) -> SpacePoint {
                          TorusPoint out = std::get<TorusPoint>(p);
                          for (std::size_t i = 0; i < t.dimension(); ++i) {
                            out.s[i] = wrap(out.s[i], t.factor(i).circumference());
                          }
                          return out;
                        },
                        [&](const RoundSphere&) -> SpacePoint {
                          SpherePoint out = std::get<SpherePoint>(p);
                          const double n = norm(out.x);
                          for (double& x : out.x) x /= n;
                          return out;
                        },
                        [&](const MeshSurface& m) -> SpacePoint { return m.canonical(std::get<MeshPoint>(p)); },
                    },
                    v_);
}

bool LengthSpace::same_point(const SpacePoint& p, const SpacePoint& q) const {
  if (const auto* m = as<MeshSurface>()) {
    check_point(p);
    check_point(q);
    return m->same_point(std::get<MeshPoint>(p), std::get<MeshPoint>(q), kEpsLen);
  }
  if (const auto* g = as<MetricGraph>()) {
    const GraphPoint a = g->canonical(std::get<GraphPoint>(canonical(p)));
    const GraphPoint b = g->canonical(std::get<GraphPoint>(canonical(q)));
    if (a.is_vertex() || b.is_vertex()) return a.is_vertex() && b.is_vertex() && a.vertex == b.vertex;
    return a.edge == b.edge && std::abs(a.offset - b.offset) <= kEpsLen;
  }
  if (as<FiniteMetric>()) {
    check_point(p);
    check_point(q);
    return std::get<FinitePoint>(p).index == std::get<FinitePoint>(q).index;
  }
  return distance(p, q) <= kEpsLen;
}

double LengthSpace::hold_tolerance() const { return exact_oracle() ? kEpsLen : kMeshHoldTolerance; }

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

SpaceHandle make_space(LengthSpace::Variant v, std::string label) {
  return std::make_shared<const LengthSpace>(std::move(v), std::move(label));
}

SpaceHandle make_circle(double diameter) {
  std::ostringstream os;
  os << "circle:" << diameter;
  return make_space(Circle(diameter), os.str());
}

SpaceHandle make_torus(std::vector<double> diameters) {
  std::ostringstream os;
  os << "torus:";
  for (std::size_t i = 0; i < diameters.size(); ++i) os << (i ? "," : "") << diameters[i];
  return make_space(FlatTorus(std::move(diameters)), os.str());
}

SpaceHandle make_sphere(int dimension) {
  return make_space(RoundSphere(dimension), "sphere" + std::to_string(dimension));
}

SpaceHandle make_finite(std::vector<std::vector<double>> matrix) {
  return make_space(FiniteMetric(std::move(matrix)), "finite");
}

SpaceHandle make_graph(std::vector<std::string> names, std::vector<GraphEdge> edges, std::string label) {
  return make_space(MetricGraph(std::move(names), std::move(edges)), std::move(label));
}

SpaceHandle make_interval(double length) {
  return make_graph({"0", "1"}, {{0, 1, length}}, "interval");
}

SpaceHandle make_theta_graph() {
  return make_graph({"v1", "v2"}, {{0, 1, 1.0}, {0, 1, 1.0}, {0, 1, 1.0}}, "theta");
}

SpaceHandle make_doubled_square_graph() {
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < 4; ++i) {
    edges.push_back({i, (i + 1) % 4, 1.0});
    edges.push_back({i, (i + 1) % 4, 1.0});
  }
  return make_graph({"v0", "v1", "v2", "v3"}, std::move(edges), "doubled-square");
}

SpaceHandle make_mesh(MeshSurface mesh, std::string label) { return make_space(std::move(mesh), std::move(label)); }

double distance(const LengthSpace& space, const SpacePoint& p, const SpacePoint& q) {
  return space.distance(p, q);
}

// ---------------------------------------------------------------------------
// Probe sets
// ---------------------------------------------------------------------------

namespace {

void sphere_probe(int n, double density, std::vector<std::vector<double>>& out) {
  if (n == 1) {
    const int m = std::max(3, static_cast<int>(std::ceil(kTwoPi / density)));
    for (int i = 0; i < m; ++i) {
      const double a = kTwoPi * i / m;
      out.push_back({std::cos(a), std::sin(a)});
    }
    return;
  }
  const int m = std::max(2, static_cast<int>(std::ceil(kPi / density)));
  for (int j = 0; j <= m; ++j) {
    const double theta = kPi * j / m;
    if (j == 0 || j == m) {
      std::vector<double> pole(n + 1, 0.0);
      pole[0] = j == 0 ? 1.0 : -1.0;
      out.push_back(std::move(pole));
      continue;
    }
    std::vector<std::vector<double>> sub;
    sphere_probe(n - 1, density / std::sin(theta), sub);
    for (auto& q : sub) {
      std::vector<double> x(n + 1);
      x[0] = std::cos(theta);
      for (int i = 0; i < n; ++i) x[i + 1] = std::sin(theta) * q[i];
      out.push_back(std::move(x));
    }
  }
}

}  // namespace

std::vector<SpacePoint> probe_set(const LengthSpace& space, double density) {
  std::vector<SpacePoint> out;
  if (const auto* m = space.as<FiniteMetric>()) {
    for (std::size_t i = 0; i < m->size(); ++i) out.push_back(FinitePoint{i});
    return out;
  }
  if (const auto* mesh = space.as<MeshSurface>()) {
    for (std::size_t i = 0; i < mesh->num_nodes(); ++i) out.push_back(mesh->node_point(i));
    return out;
  }
  if (!(density > 0.0)) throw Error(ErrorKind::kInvalidArgument, "probe density must be positive");
  if (const auto* g = space.as<MetricGraph>()) {
    for (std::size_t v = 0; v < g->num_vertices(); ++v) out.push_back(GraphPoint::at_vertex(v));
    for (std::size_t e = 0; e < g->edges().size(); ++e) {
      const double len = g->edge(e).length;
      const int n = std::max(2, static_cast<int>(std::ceil(len / density)));
      for (int i = 1; i < n; ++i) out.push_back(GraphPoint::on_edge(e, len * i / n));
    }
    return out;
  }
  if (const auto* c = space.as<Circle>()) {
    const int n = std::max(2, static_cast<int>(std::ceil(c->circumference() / density)));
    for (int i = 0; i < n; ++i) out.push_back(CirclePoint{c->circumference() * i / n});
    return out;
  }
  if (const auto* t = space.as<FlatTorus>()) {
    std::vector<int> counts;
    for (std::size_t i = 0; i < t->dimension(); ++i) {
      counts.push_back(std::max(2, static_cast<int>(std::ceil(t->factor(i).circumference() / density))));
    }
    std::vector<int> idx(counts.size(), 0);
    while (true) {
      TorusPoint p;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        p.s.push_back(t->factor(i).circumference() * idx[i] / counts[i]);
      }
      out.push_back(std::move(p));
      std::size_t i = 0;
      while (i < counts.size() && ++idx[i] == counts[i]) idx[i++] = 0;
      if (i == counts.size()) break;
    }
    return out;
  }
  const auto& s = std::get<RoundSphere>(space.variant());
  std::vector<std::vector<double>> pts;
  sphere_probe(s.dimension(), density, pts);
  for (auto& x : pts) out.push_back(SpherePoint{std::move(x)});
  return out;
}

// ---------------------------------------------------------------------------
// Diameter and radius
// ---------------------------------------------------------------------------

namespace {

/// f(x, y) = c + cx * x + cy * y.
struct Lin {
  double c, cx, cy;
  double at(double x, double y) const { return c + cx * x + cy * y; }
};

/// Exact max over [0,X]x[0,Y] of min_i f_i, optionally also min'd with |x - y|.
/// The function is piecewise linear on the arrangement of the lines f_i = f_j,
/// x = y and the box sides, so its maximum sits on a vertex of it.
double max_of_min(const std::vector<Lin>& fs, double X, double Y, bool with_abs) {
  std::vector<Lin> pieces = fs;
  if (with_abs) {
    pieces.push_back({0, 1, -1});
    pieces.push_back({0, -1, 1});
  }
  auto value = [&](double x, double y) {
    double m = kInf;
    for (const auto& f : fs) m = std::min(m, f.at(x, y));
    if (with_abs) m = std::min(m, std::abs(x - y));
    return m;
  };
  // Lines a x + b y = c.
  std::vector<std::array<double, 3>> lines = {{1, 0, 0}, {1, 0, X}, {0, 1, 0}, {0, 1, Y}};
  if (with_abs) lines.push_back({1, -1, 0});
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      const double a = pieces[i].cx - pieces[j].cx;
      const double b = pieces[i].cy - pieces[j].cy;
      if (a == 0 && b == 0) continue;
      lines.push_back({a, b, pieces[j].c - pieces[i].c});
    }
  }
  double best = -kInf;
  const double tol = 1e-12 * (1 + X + Y);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& l1 = lines[i];
      const auto& l2 = lines[j];
      const double det = l1[0] * l2[1] - l1[1] * l2[0];
      if (std::abs(det) < 1e-14) continue;
      double x = (l1[2] * l2[1] - l1[1] * l2[2]) / det;
      double y = (l1[0] * l2[2] - l1[2] * l2[0]) / det;
      if (x < -tol || x > X + tol || y < -tol || y > Y + tol) continue;
      x = std::clamp(x, 0.0, X);
      y = std::clamp(y, 0.0, Y);
      best = std::max(best, value(x, y));
    }
  }
  return best;
}

/// Eccentricity of p on a metric graph: sup over all points q of d(p, q).
double graph_eccentricity(const MetricGraph& g, const GraphPoint& p0) {
  const GraphPoint p = g.canonical(p0);
  const auto pa = g.anchors(p);
  double ecc = 0.0;
  for (std::size_t f = 0; f < g.edges().size(); ++f) {
    const auto& ed = g.edge(f);
    // Distances to q at offset y on f are min of (c + y) and (c' - y) pieces.
    std::vector<std::pair<double, double>> fs;  // (c, slope)
    for (const auto& a : pa) {
      fs.push_back({a.dist + g.vertex_distance(a.vertex, ed.a), 1.0});
      fs.push_back({a.dist + g.vertex_distance(a.vertex, ed.b) + ed.length, -1.0});
    }
    const bool same = !p.is_vertex() && p.edge == f;
    auto value = [&](double y) {
      double m = kInf;
      for (auto [c, s] : fs) m = std::min(m, c + s * y);
      if (same) m = std::min(m, std::abs(y - p.offset));
      return m;
    };
    std::vector<double> ys = {0.0, ed.length};
    auto pieces = fs;
    if (same) {
      pieces.push_back({-p.offset, 1.0});
      pieces.push_back({p.offset, -1.0});
      ys.push_back(p.offset);
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        if (pieces[i].second == pieces[j].second) continue;
        const double y = (pieces[j].first - pieces[i].first) / (pieces[i].second - pieces[j].second);
        if (y > 0 && y < ed.length) ys.push_back(y);
      }
    }
    for (double y : ys) ecc = std::max(ecc, value(y));
  }
  return ecc;
}

double graph_diameter(const MetricGraph& g) {
  double best = 0.0;
  const auto& E = g.edges();
  for (std::size_t e = 0; e < E.size(); ++e) {
    for (std::size_t f = e; f < E.size(); ++f) {
      const auto& a = E[e];
      const auto& b = E[f];
      const double le = a.length, lf = b.length;
      std::vector<Lin> fs = {
          {g.vertex_distance(a.a, b.a), 1, 1},
          {g.vertex_distance(a.a, b.b) + lf, 1, -1},
          {le + g.vertex_distance(a.b, b.a), -1, 1},
          {le + lf + g.vertex_distance(a.b, b.b), -1, -1},
      };
      best = std::max(best, max_of_min(fs, le, lf, e == f));
    }
  }
  return best;
}

double torus_extent(const FlatTorus& t) {
  double s = 0;
  for (std::size_t i = 0; i < t.dimension(); ++i) s += t.factor(i).diameter() * t.factor(i).diameter();
  return std::sqrt(s);
}

}  // namespace

double diameter(const LengthSpace& space, double density) {
  if (const auto* m = space.as<FiniteMetric>()) {
    double best = 0;
    for (const auto& row : m->matrix()) best = std::max(best, *std::max_element(row.begin(), row.end()));
    return best;
  }
  if (const auto* g = space.as<MetricGraph>()) {
    if (g->edges().empty()) return 0.0;
    return graph_diameter(*g);
  }
  if (const auto* c = space.as<Circle>()) return c->diameter();
  if (const auto* t = space.as<FlatTorus>()) return torus_extent(*t);
  if (space.as<RoundSphere>()) return kPi;
  const auto& mesh = std::get<MeshSurface>(space.variant());
  double best = 0;
  for (std::size_t v = 0; v < mesh.vertices().size(); ++v) {
    const auto d = mesh.distances_from(mesh.vertex_point(v));
    for (std::size_t w = 0; w < mesh.vertices().size(); ++w) best = std::max(best, d[w]);
  }
  (void)density;
  return best;
}

double radius(const LengthSpace& space, double density) {
  if (const auto* m = space.as<FiniteMetric>()) {
    double best = kInf;
    for (const auto& row : m->matrix()) best = std::min(best, *std::max_element(row.begin(), row.end()));
    return best;
  }
  if (const auto* g = space.as<MetricGraph>()) {
    if (g->edges().empty()) return 0.0;
    double best = kInf;
    for (const auto& p : probe_set(space, density)) {
      best = std::min(best, graph_eccentricity(*g, std::get<GraphPoint>(p)));
    }
    for (std::size_t e = 0; e < g->edges().size(); ++e) {
      best = std::min(best, graph_eccentricity(*g, GraphPoint::on_edge(e, g->edge(e).length / 2)));
    }
    return best;
  }
  if (const auto* c = space.as<Circle>()) return c->diameter();
  if (const auto* t = space.as<FlatTorus>()) return torus_extent(*t);
  if (space.as<RoundSphere>()) return kPi;
  const auto& mesh = std::get<MeshSurface>(space.variant());
  double best = kInf;
  for (std::size_t v = 0; v < mesh.vertices().size(); ++v) {
    const auto d = mesh.distances_from(mesh.vertex_point(v));
    double ecc = 0;
    for (std::size_t w = 0; w < mesh.vertices().size(); ++w) ecc = std::max(ecc, d[w]);
    best = std::min(best, ecc);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Nets
// ---------------------------------------------------------------------------

NetSample build_net(const SpaceHandle& space, double r, double density) {
  const bool finite = space->as<FiniteMetric>() != nullptr;
  if (r < 0.0 || (r == 0.0 && !finite) || !std::isfinite(r)) {
    throw Error(ErrorKind::kInvalidArgument, "net resolution must be positive");
  }
  if (!finite && !space->as<MeshSurface>() && !(density > 0.0 && density <= r / 4 + 1e-15)) {
    throw Error(ErrorKind::kInvalidArgument, "probe density must lie in (0, r/4]");
  }
  const auto probes = probe_set(*space, density);
  const auto* mesh = space->as<MeshSurface>();

  NetSample net{space, {}, r, 0.0};
  std::vector<double> gap(probes.size(), kInf);
  std::size_t next = 0;
  while (true) {
    net.points.push_back(probes[next]);
    if (mesh) {
      const auto d = mesh->distances_from(std::get<MeshPoint>(probes[next]));
      for (std::size_t i = 0; i < probes.size(); ++i) gap[i] = std::min(gap[i], d[i]);
    } else {
      for (std::size_t i = 0; i < probes.size(); ++i) {
        gap[i] = std::min(gap[i], space->distance(probes[next], probes[i]));
      }
    }
    next = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    net.achieved = gap[next];
    if (gap[next] <= r) break;
  }
  return net;
}

// ---------------------------------------------------------------------------
// Tangent structure
// ---------------------------------------------------------------------------

Tangent log_map(const LengthSpace& space, const SpacePoint& p, const SpacePoint& q) {
  space.check_point(p);
  space.check_point(q);
  if (const auto* c = space.as<Circle>()) {
    const double delta = c->displacement(std::get<CirclePoint>(p).s, std::get<CirclePoint>(q).s);
    if (std::abs(delta) >= c->diameter() - kEpsLen) {
      throw Error(ErrorKind::kAmbiguousDirection, "antipodal points on a circle");
    }
    return {delta};
  }
  if (const auto* t = space.as<FlatTorus>()) {
    Tangent v(t->dimension());
    const auto& a = std::get<TorusPoint>(p);
    const auto& b = std::get<TorusPoint>(q);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = t->factor(i).displacement(a.s[i], b.s[i]);
      if (std::abs(v[i]) >= t->factor(i).diameter() - kEpsLen) {
        throw Error(ErrorKind::kAmbiguousDirection, "antipodal coordinate on a torus factor");
      }
    }
    return v;
  }
  if (space.as<RoundSphere>()) {
    const auto& a = std::get<SpherePoint>(p).x;
    const auto& b = std::get<SpherePoint>(q).x;
    const double theta = std::get<RoundSphere>(space.variant()).distance(std::get<SpherePoint>(p),
                                                                          std::get<SpherePoint>(q));
    if (theta >= kPi - 1e-7) throw Error(ErrorKind::kAmbiguousDirection, "antipodal points on a sphere");
    Tangent w(a.size());
    const double c = dot(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = b[i] - c * a[i];
    const double wn = norm(w);
    if (wn == 0.0 || theta == 0.0) return Tangent(a.size(), 0.0);
    for (double& x : w) x *= theta / wn;
    return w;
  }
  if (const auto* g = space.as<MetricGraph>()) {
    const GraphPoint a = g->canonical(std::get<GraphPoint>(p));
    const GraphPoint b = g->canonical(std::get<GraphPoint>(q));
    if (a.is_vertex()) throw Error(ErrorKind::kAmbiguousDirection, "graph point sits on a vertex");
    const auto& ed = g->edge(a.edge);
    // Candidate (length, direction) pairs.
    std::vector<std::pair<double, int>> cand;
    for (const auto& anc : g->anchors(b)) {
      cand.push_back({a.offset + g->vertex_distance(ed.a, anc.vertex) + anc.dist, -1});
      cand.push_back({ed.length - a.offset + g->vertex_distance(ed.b, anc.vertex) + anc.dist, +1});
    }
    if (!b.is_vertex() && b.edge == a.edge) {
      const double dy = b.offset - a.offset;
      cand.push_back({std::abs(dy), dy >= 0 ? +1 : -1});
    }
    auto best = *std::min_element(cand.begin(), cand.end());
    if (best.first <= kEpsLen) return {0.0};
    for (const auto& c : cand) {
      if (c.second != best.second && c.first <= best.first + kEpsLen) {
        throw Error(ErrorKind::kAmbiguousDirection, "two minimizing directions along the edge");
      }
    }
    return {best.second * best.first};
  }
  throw Error(ErrorKind::kUnsupportedVariant, "log map on a " + space.kind_name());
}

SpacePoint exp_map(const LengthSpace& space, const SpacePoint& p, const Tangent& v) {
  space.check_point(p);
  if (const auto* c = space.as<Circle>()) {
    return CirclePoint{wrap(std::get<CirclePoint>(p).s + v.at(0), c->circumference())};
  }
  if (const auto* t = space.as<FlatTorus>()) {
    TorusPoint out = std::get<TorusPoint>(p);
    for (std::size_t i = 0; i < out.s.size(); ++i) {
      out.s[i] = wrap(out.s[i] + v.at(i), t->factor(i).circumference());
    }
    return out;
  }
  if (space.as<RoundSphere>()) {
    const auto& x = std::get<SpherePoint>(p).x;
    Tangent w = v;
    const double c = dot(w, x);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * x[i];
    const double theta = norm(w);
    SpherePoint out{x};
    if (theta > 0) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        out.x[i] = std::cos(theta) * x[i] + std::sin(theta) * w[i] / theta;
      }
    }
    const double n = norm(out.x);
    for (double& y : out.x) y /= n;
    return out;
  }
  if (const auto* g = space.as<MetricGraph>()) {
    const GraphPoint a = g->canonical(std::get<GraphPoint>(p));
    if (a.is_vertex()) throw Error(ErrorKind::kAmbiguousDirection, "graph point sits on a vertex");
    const double off = a.offset + v.at(0);
    if (off <= kEpsLen || off >= g->edge(a.edge).length - kEpsLen) {
      throw Error(ErrorKind::kInvalidArgument, "step leaves the edge interior");
    }
    return GraphPoint::on_edge(a.edge, off);
  }
  throw Error(ErrorKind::kUnsupportedVariant, "exp map on a " + space.kind_name());
}

std::vector<Tangent> tangent_basis(const LengthSpace& space, const SpacePoint& p) {
  space.check_point(p);
  if (space.as<Circle>() || space.as<MetricGraph>()) return {{1.0}};
  if (const auto* t = space.as<FlatTorus>()) {
    std::vector<Tangent> out;
    for (std::size_t i = 0; i < t->dimension(); ++i) {
      Tangent e(t->dimension(), 0.0);
      e[i] = 1.0;
      out.push_back(std::move(e));
    }
    return out;
  }
  if (const auto* s = space.as<RoundSphere>()) {
    const auto& x = std::get<SpherePoint>(p).x;
    std::vector<Tangent> out;
    for (std::size_t i = 0; i < x.size() && out.size() < static_cast<std::size_t>(s->dimension()); ++i) {
      Tangent e(x.size(), 0.0);
      e[i] = 1.0;
      double c = dot(e, x);
      for (std::size_t j = 0; j < e.size(); ++j) e[j] -= c * x[j];
      for (const auto& b : out) {
        c = dot(e, b);
        for (std::size_t j = 0; j < e.size(); ++j) e[j] -= c * b[j];
      }
      const double n = norm(e);
      if (n < 1e-6) continue;
      for (double& y : e) y /= n;
      out.push_back(std::move(e));
    }
    return out;
  }
  throw Error(ErrorKind::kUnsupportedVariant, "tangent basis on a " + space.kind_name());
}

}  // namespace lsl
