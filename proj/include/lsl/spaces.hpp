#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsl/common.hpp"
#include "lsl/mesh.hpp"

namespace lsl {

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

struct FinitePoint {
  std::size_t index = 0;
};

/// A point of a metric graph: either a vertex, or an offset along an edge
/// measured from the edge's first endpoint.
struct GraphPoint {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t vertex = npos;
  std::size_t edge = npos;
  double offset = 0.0;

  static GraphPoint at_vertex(std::size_t v) { return GraphPoint{v, npos, 0.0}; }
  static GraphPoint on_edge(std::size_t e, double offset) { return GraphPoint{npos, e, offset}; }
  bool is_vertex() const { return vertex != npos; }
};

/// Arclength position on a circle, in [0, circumference).
struct CirclePoint {
  double s = 0.0;
};

/// Per-factor arclength positions on a flat torus.
struct TorusPoint {
  std::vector<double> s;
};

/// Unit vector in R^{n+1}.
struct SpherePoint {
  std::vector<double> x;
};

using SpacePoint =
    std::variant<FinitePoint, GraphPoint, CirclePoint, TorusPoint, SpherePoint, MeshPoint>;

/// Tangent vector in ambient coordinates (1 for circles and graph edges, m for
/// an m-torus, n+1 for an n-sphere).
using Tangent = std::vector<double>;

// ---------------------------------------------------------------------------
// Space variants
// ---------------------------------------------------------------------------

class FiniteMetric {
 public:
  /// Throws kInvalidArgument unless the matrix is a metric.
  explicit FiniteMetric(std::vector<std::vector<double>> matrix);

  std::size_t size() const { return d_.size(); }
  double distance(std::size_t i, std::size_t j) const { return d_[i][j]; }
  const std::vector<std::vector<double>>& matrix() const { return d_; }

 private:
  std::vector<std::vector<double>> d_;
};

struct GraphEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 1.0;
};

/// Connected metric graph. Loops and parallel edges are allowed.
class MetricGraph {
 public:
  struct Anchor {
    std::size_t vertex;
    double dist;
  };

  MetricGraph(std::vector<std::string> vertex_names, std::vector<GraphEdge> edges);

  std::size_t num_vertices() const { return names_.size(); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphEdge& edge(std::size_t e) const { return edges_[e]; }
  /// Directed incidences: for every vertex, pairs (edge, +1 if it leaves from
  /// the edge's first endpoint else -1). Loops appear twice.
  const std::vector<std::vector<std::pair<std::size_t, int>>>& incidence() const {
    return incidence_;
  }

  double vertex_distance(std::size_t u, std::size_t v) const { return dist_[u * names_.size() + v]; }
  double distance(const GraphPoint& p, const GraphPoint& q) const;
  GraphPoint canonical(const GraphPoint& p) const;
  /// Vertices reachable from p along its own edge, with the offsets to them.
  std::vector<Anchor> anchors(const GraphPoint& p) const;
  /// |E| - |V| + 1 for a connected graph.
  std::size_t first_betti() const { return edges_.size() + 1 - names_.size(); }
  double total_length() const;
  std::optional<std::size_t> find_vertex(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::pair<std::size_t, int>>> incidence_;
  std::vector<double> dist_;
};

/// Circle with the given diameter; circumference is twice the diameter.
class Circle {
 public:
  explicit Circle(double diameter);
  double diameter() const { return d_; }
  double circumference() const { return 2.0 * d_; }
  /// Shortest signed displacement from a to b, in (-d, d].
  double displacement(double a, double b) const;
  double distance(double a, double b) const;

 private:
  double d_;
};

/// Product of circles with the given diameters (product metric).
class FlatTorus {
 public:
  explicit FlatTorus(std::vector<double> diameters);
  std::size_t dimension() const { return factors_.size(); }
  const Circle& factor(std::size_t i) const { return factors_[i]; }
  std::vector<double> diameters() const;
  double distance(const TorusPoint& p, const TorusPoint& q) const;

 private:
  std::vector<Circle> factors_;
};

/// Unit round sphere S^n embedded in R^{n+1}.
class RoundSphere {
 public:
  explicit RoundSphere(int dimension);
  int dimension() const { return n_; }
  double distance(const SpherePoint& p, const SpherePoint& q) const;

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// LengthSpace
// ---------------------------------------------------------------------------

class LengthSpace {
 public:
  using Variant = std::variant<FiniteMetric, MetricGraph, Circle, FlatTorus, RoundSphere, MeshSurface>;

  explicit LengthSpace(Variant v, std::string label = {});

  const Variant& variant() const { return v_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }
  const std::string& label() const { return label_; }
  std::string kind_name() const;

  /// Throws kMismatchedVariant if p does not belong to this space.
  void check_point(const SpacePoint& p) const;
  double distance(const SpacePoint& p, const SpacePoint& q) const;
  SpacePoint canonical(const SpacePoint& p) const;
  bool same_point(const SpacePoint& p, const SpacePoint& q) const;

  /// True when distances are exact up to rounding (everything but meshes).
  bool exact_oracle() const { return !std::holds_alternative<MeshSurface>(v_); }
  /// Slack below which a distance deficit is treated as equality.
  double hold_tolerance() const;
  /// Absolute deficit tolerated on meshes, whose distances are approximate.
  static constexpr double kMeshHoldTolerance = 1e-4;

 private:
  Variant v_;
  std::string label_;
};

using SpaceHandle = std::shared_ptr<const LengthSpace>;

SpaceHandle make_space(LengthSpace::Variant v, std::string label = {});
SpaceHandle make_circle(double diameter);
SpaceHandle make_torus(std::vector<double> diameters);
SpaceHandle make_sphere(int dimension);
SpaceHandle make_finite(std::vector<std::vector<double>> matrix);
SpaceHandle make_graph(std::vector<std::string> names, std::vector<GraphEdge> edges,
                       std::string label = "graph");
/// The segment [0, length] as a two-vertex graph.
SpaceHandle make_interval(double length = 1.0);
/// Two vertices joined by three unit edges.
SpaceHandle make_theta_graph();
/// Four cyclically ordered vertices, consecutive ones joined by two unit edges.
SpaceHandle make_doubled_square_graph();
SpaceHandle make_mesh(MeshSurface mesh, std::string label = "mesh");

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double distance(const LengthSpace& space, const SpacePoint& p, const SpacePoint& q);

/// Deterministic probe set with spacing at most `density` (meshes use their
/// refinement nodes and ignore the density).
std::vector<SpacePoint> probe_set(const LengthSpace& space, double density);

double diameter(const LengthSpace& space, double density);
double radius(const LengthSpace& space, double density);

struct NetSample {
  SpaceHandle space;
  std::vector<SpacePoint> points;
  double resolution = 0.0;
  /// Covering radius actually achieved on the probe set.
  double achieved = 0.0;
};

/// Greedy farthest-point r-net over the probe set. r = 0 is accepted for
/// finite metrics only.
NetSample build_net(const SpaceHandle& space, double r, double density);

/// Initial velocity of the unique minimizing segment from p to q.
/// Supported on circles, tori, spheres, and edge-interior graph points.
Tangent log_map(const LengthSpace& space, const SpacePoint& p, const SpacePoint& q);
/// Geodesic step from p with velocity v. On graphs the step must stay inside
/// the edge (kInvalidArgument otherwise).
SpacePoint exp_map(const LengthSpace& space, const SpacePoint& p, const Tangent& v);
/// Orthonormal basis of the tangent space at p (ambient coordinates).
std::vector<Tangent> tangent_basis(const LengthSpace& space, const SpacePoint& p);

}  // namespace lsl
