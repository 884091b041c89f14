#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace lsl {

using Vec3 = std::array<double, 3>;

/// A point on a triangulated surface: a face and barycentric coordinates in it.
struct MeshPoint {
  std::size_t face = 0;
  std::array<double, 3> bary{1.0, 0.0, 0.0};
};

/// Closed, connected, edge-manifold triangle mesh with an approximate
/// geodesic distance.
///
/// Distances are shortest paths in a graph refined with `steiner` points per
/// mesh edge, where every pair of nodes on the boundary of a common face is
/// joined by a straight segment. The result is an upper bound on the exact
/// polyhedral distance with error O(max edge length / (steiner + 1)).
class MeshSurface {
 public:
  /// One straight piece of a path, lying inside `face`.
  struct PathPiece {
    std::size_t face = 0;
    std::array<double, 3> from{};
    std::array<double, 3> to{};
    double length = 0.0;
  };

  MeshSurface(std::vector<Vec3> vertices, std::vector<std::array<std::size_t, 3>> faces,
              int steiner = 4);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<std::size_t, 3>>& faces() const { return faces_; }
  int steiner() const { return steiner_; }
  double max_edge_length() const { return max_edge_length_; }
  std::size_t num_nodes() const { return node_pos_.size(); }

  Vec3 position(const MeshPoint& p) const;
  MeshPoint vertex_point(std::size_t v) const;
  MeshPoint node_point(std::size_t node) const;
  /// Representation with clamped, normalized barycentrics. Points on a vertex
  /// or an edge are moved to the lowest-index incident face.
  MeshPoint canonical(const MeshPoint& p) const;
  bool same_point(const MeshPoint& p, const MeshPoint& q, double tol) const;

  double distance(const MeshPoint& p, const MeshPoint& q) const;
  /// Distance from p to every refinement node.
  std::vector<double> distances_from(const MeshPoint& p) const;

  /// Single-source distances, reusable for any number of targets.
  struct DistanceField {
    Vec3 position{};
    std::vector<std::size_t> faces;
    std::vector<double> dist;
  };
  DistanceField field_from(const MeshPoint& p) const;
  /// Equals distance(source, q).
  double distance_via(const DistanceField& field, const MeshPoint& q) const;
  /// Faces containing p, with p's barycentrics in each.
  std::vector<MeshPoint> incident_faces(const MeshPoint& p) const;
  std::vector<PathPiece> shortest_path(const MeshPoint& p, const MeshPoint& q) const;

  /// Vertex cycles known to be closed geodesics (e.g. symmetry-plane sections of
  /// generated ellipsoids). Used to seed heuristic spectra.
  const std::vector<std::vector<std::size_t>>& seed_cycles() const { return seed_cycles_; }
  void set_seed_cycles(std::vector<std::vector<std::size_t>> cycles) {
    seed_cycles_ = std::move(cycles);
  }

 private:
  struct Arc {
    std::size_t to;
    double weight;
    std::size_t face;
  };
  struct Search;

  Search search(const MeshPoint& p, const MeshPoint* target) const;
  std::array<double, 3> node_bary_in_face(std::size_t node, std::size_t face) const;
  std::size_t vertex_face(std::size_t v) const { return vertex_faces_[v].front(); }

  std::vector<Vec3> vertices_;
  std::vector<std::array<std::size_t, 3>> faces_;
  int steiner_;
  double max_edge_length_ = 0.0;

  std::vector<std::vector<std::size_t>> vertex_faces_;
  std::vector<std::array<std::size_t, 2>> edge_vertices_;
  std::vector<std::array<std::size_t, 2>> edge_faces_;
  std::vector<std::array<std::size_t, 3>> face_edges_;

  std::vector<Vec3> node_pos_;
  std::vector<MeshPoint> node_home_;
  std::vector<std::vector<std::size_t>> face_nodes_;
  std::vector<std::size_t> adj_offset_;
  std::vector<Arc> arcs_;

  std::vector<std::vector<std::size_t>> seed_cycles_;
};

/// UV-sphere triangulation of the ellipsoid x^2 + y^2 + (z/c)^2 = 1 with
/// `ring` vertices on every latitude and `bands` latitude bands. `ring` must be
/// a multiple of 4. Seed cycles: the equator and the meridians in the xz and yz
/// planes. c = 0 yields the doubled disk with the same combinatorics.
MeshSurface ellipsoid_mesh(double c, int ring = 32, int bands = 24, int steiner = 4);

/// Surface of the box [-h0, h0] x [-h1, h1] x [-h2, h2], every face cut into an
/// n x n grid of squares. Seed cycle: the z = 0 section.
MeshSurface box_mesh(const Vec3& half, int n = 4, int steiner = 4);

}  // namespace lsl
