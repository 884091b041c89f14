#include "lsl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

#include "lsl/common.hpp"

namespace lsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBaryTol = 1e-12;

double dist3(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

struct MeshSurface::Search {
  std::vector<double> dist;
  std::vector<std::size_t> pred;
  std::vector<std::size_t> pred_face;
  /// Best distance to the target, and the node through which it is reached
  /// (npos for the direct in-face segment).
  double target_dist = kInf;
  std::size_t target_pred = static_cast<std::size_t>(-1);
  std::size_t target_face = 0;
};

MeshSurface::MeshSurface(std::vector<Vec3> vertices, std::vector<std::array<std::size_t, 3>> faces,
                         int steiner)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), steiner_(steiner) {
  const std::size_t nv = vertices_.size();
  if (nv < 3 || faces_.empty()) throw Error(ErrorKind::kInvalidArgument, "mesh needs vertices and faces");
  if (steiner < 0) throw Error(ErrorKind::kInvalidArgument, "steiner count must be nonnegative");

  vertex_faces_.assign(nv, {});
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_id;
  face_edges_.resize(faces_.size());
  std::vector<std::vector<std::size_t>> edge_face_lists;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& tri = faces_[f];
    for (int i = 0; i < 3; ++i) {
      if (tri[i] >= nv) throw Error(ErrorKind::kInvalidArgument, "face vertex out of range");
      if (tri[i] == tri[(i + 1) % 3]) throw Error(ErrorKind::kInvalidArgument, "degenerate face");
      vertex_faces_[tri[i]].push_back(f);
    }
    for (int i = 0; i < 3; ++i) {
      const std::size_t a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, fresh] = edge_id.try_emplace({key.first, key.second}, edge_vertices_.size());
      if (fresh) {
        edge_vertices_.push_back({key.first, key.second});
        edge_face_lists.emplace_back();
      }
      face_edges_[f][i] = it->second;  // edge opposite corner i
      edge_face_lists[it->second].push_back(f);
    }
  }
  for (const auto& fl : edge_face_lists) {
    if (fl.size() != 2) throw Error(ErrorKind::kInvalidArgument, "mesh is not a closed edge-manifold");
    edge_faces_.push_back({fl[0], fl[1]});
  }
  for (const auto& vf : vertex_faces_) {
    if (vf.empty()) throw Error(ErrorKind::kInvalidArgument, "mesh has an isolated vertex");
  }
  {
    std::vector<bool> seen(faces_.size(), false);
    std::vector<std::size_t> stack = {0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t f = stack.back();
      stack.pop_back();
      for (std::size_t e : face_edges_[f]) {
        for (std::size_t g : edge_faces_[e]) {
          if (!seen[g]) {
            seen[g] = true;
            ++count;
            stack.push_back(g);
          }
        }
      }
    }
    if (count != faces_.size()) throw Error(ErrorKind::kInvalidArgument, "mesh is not connected");
  }

  for (const auto& ev : edge_vertices_) {
    max_edge_length_ = std::max(max_edge_length_, dist3(vertices_[ev[0]], vertices_[ev[1]]));
  }

  // Nodes: mesh vertices first, then `steiner` interior points per edge.
  node_pos_ = vertices_;
  for (std::size_t v = 0; v < nv; ++v) node_home_.push_back(vertex_point(v));
  for (std::size_t e = 0; e < edge_vertices_.size(); ++e) {
    const Vec3& a = vertices_[edge_vertices_[e][0]];
    const Vec3& b = vertices_[edge_vertices_[e][1]];
    for (int i = 0; i < steiner_; ++i) {
      const double t = static_cast<double>(i + 1) / (steiner_ + 1);
      node_pos_.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])});
      const std::size_t node = node_pos_.size() - 1;
      const std::size_t f = std::min(edge_faces_[e][0], edge_faces_[e][1]);
      node_home_.push_back({f, {0, 0, 0}});
      node_home_.back().bary = node_bary_in_face(node, f);
    }
  }

  face_nodes_.resize(faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    auto& fn = face_nodes_[f];
    for (std::size_t v : faces_[f]) fn.push_back(v);
    for (std::size_t e : face_edges_[f]) {
      for (int i = 0; i < steiner_; ++i) fn.push_back(nv + e * steiner_ + i);
    }
  }

  std::vector<std::vector<Arc>> adj(node_pos_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& fn = face_nodes_[f];
    for (std::size_t i = 0; i < fn.size(); ++i) {
      for (std::size_t j = i + 1; j < fn.size(); ++j) {
        const double w = dist3(node_pos_[fn[i]], node_pos_[fn[j]]);
        adj[fn[i]].push_back({fn[j], w, f});
        adj[fn[j]].push_back({fn[i], w, f});
      }
    }
  }
  adj_offset_.push_back(0);
  for (auto& list : adj) {
    arcs_.insert(arcs_.end(), list.begin(), list.end());
    adj_offset_.push_back(arcs_.size());
  }
}

std::array<double, 3> MeshSurface::node_bary_in_face(std::size_t node, std::size_t face) const {
  const auto& tri = faces_[face];
  std::array<double, 3> bary{0, 0, 0};
  const std::size_t nv = vertices_.size();
  if (node < nv) {
    for (int i = 0; i < 3; ++i) {
      if (tri[i] == node) bary[i] = 1.0;
    }
    return bary;
  }
  const std::size_t e = (node - nv) / steiner_;
  const int k = static_cast<int>((node - nv) % steiner_);
  const double t = static_cast<double>(k + 1) / (steiner_ + 1);
  for (int i = 0; i < 3; ++i) {
    if (tri[i] == edge_vertices_[e][0]) bary[i] = 1.0 - t;
    if (tri[i] == edge_vertices_[e][1]) bary[i] = t;
  }
  return bary;
}

Vec3 MeshSurface::position(const MeshPoint& p) const {
  Vec3 out{0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    const Vec3& v = vertices_[faces_[p.face][i]];
    for (int c = 0; c < 3; ++c) out[c] += p.bary[i] * v[c];
  }
  return out;
}

MeshPoint MeshSurface::vertex_point(std::size_t v) const {
  const std::size_t f = vertex_face(v);
  MeshPoint p{f, {0, 0, 0}};
  for (int i = 0; i < 3; ++i) {
    if (faces_[f][i] == v) p.bary[i] = 1.0;
  }
  return p;
}

MeshPoint MeshSurface::node_point(std::size_t node) const { return node_home_.at(node); }

MeshPoint MeshSurface::canonical(const MeshPoint& p0) const {
  if (p0.face >= faces_.size()) throw Error(ErrorKind::kInvalidArgument, "face out of range");
  MeshPoint p = p0;
  double sum = 0;
  for (double& b : p.bary) {
    if (b < -1e-9) throw Error(ErrorKind::kInvalidArgument, "barycentric coordinate out of range");
    b = std::max(b, 0.0);
    sum += b;
  }
  if (!(sum > 0)) throw Error(ErrorKind::kInvalidArgument, "barycentric coordinates sum to zero");
  for (double& b : p.bary) b /= sum;

  int zeros = 0;
  for (double& b : p.bary) {
    if (b <= kBaryTol) {
      b = 0.0;
      ++zeros;
    }
  }
  if (zeros == 2) {
    for (int i = 0; i < 3; ++i) {
      if (p.bary[i] > 0) return vertex_point(faces_[p.face][i]);
    }
  }
  if (zeros == 1) {
    int z = 0;
    while (p.bary[z] != 0.0) ++z;
    const std::size_t e = face_edges_[p.face][z];
    const std::size_t f = std::min(edge_faces_[e][0], edge_faces_[e][1]);
    if (f == p.face) return p;
    MeshPoint q{f, {0, 0, 0}};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (faces_[f][j] == faces_[p.face][i]) q.bary[j] = p.bary[i];
      }
    }
    return q;
  }
  return p;
}

bool MeshSurface::same_point(const MeshPoint& p0, const MeshPoint& q0, double tol) const {
  const MeshPoint p = canonical(p0);
  const MeshPoint q = canonical(q0);
  if (p.face == q.face) {
    return dist3(position(p), position(q)) <= tol;
  }
  return distance(p, q) <= tol;
}

std::vector<MeshPoint> MeshSurface::incident_faces(const MeshPoint& p0) const {
  const MeshPoint p = canonical(p0);
  int zeros = 0;
  for (double b : p.bary) zeros += b == 0.0;
  if (zeros == 0) return {p};
  std::size_t nonzero = 0, pivot = 0;
  for (int i = 0; i < 3; ++i) {
    if (p.bary[i] != 0.0) {
      pivot = faces_[p.face][i];
      ++nonzero;
    }
  }
  std::vector<MeshPoint> out;
  for (std::size_t f : vertex_faces_[pivot]) {
    const auto& tri = faces_[f];
    MeshPoint q{f, {0, 0, 0}};
    std::size_t hit = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (tri[j] == faces_[p.face][i] && p.bary[i] != 0.0) {
          q.bary[j] = p.bary[i];
          ++hit;
        }
      }
    }
    if (hit == nonzero) out.push_back(q);
  }
  std::sort(out.begin(), out.end(), [](const MeshPoint& x, const MeshPoint& y) { return x.face < y.face; });
  return out;
}

MeshSurface::Search MeshSurface::search(const MeshPoint& p0, const MeshPoint* target) const {
  const MeshPoint p = canonical(p0);
  const Vec3 pp = position(p);
  Search s;
  s.dist.assign(node_pos_.size(), kInf);
  s.pred.assign(node_pos_.size(), static_cast<std::size_t>(-1));
  s.pred_face.assign(node_pos_.size(), 0);

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const auto p_faces = incident_faces(p);
  for (const auto& pf : p_faces) {
    for (std::size_t n : face_nodes_[pf.face]) {
      const double d = dist3(pp, node_pos_[n]);
      if (d < s.dist[n]) {
        s.dist[n] = d;
        s.pred_face[n] = pf.face;
        pq.push({d, n});
      }
    }
  }

  std::vector<char> is_target_node;
  Vec3 qp{};
  if (target) {
    const MeshPoint q = canonical(*target);
    qp = position(q);
    is_target_node.assign(node_pos_.size(), 0);
    const auto q_faces = incident_faces(q);
    for (const auto& qf : q_faces) {
      for (std::size_t n : face_nodes_[qf.face]) is_target_node[n] = 1;
      for (const auto& pf : p_faces) {
        if (pf.face == qf.face && dist3(pp, qp) < s.target_dist) {
          s.target_dist = dist3(pp, qp);
          s.target_face = pf.face;
        }
      }
    }
  }

  std::vector<char> done(node_pos_.size(), 0);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    if (target && d >= s.target_dist) break;
    done[u] = 1;
    if (target && is_target_node[u]) {
      const double t = d + dist3(node_pos_[u], qp);
      if (t < s.target_dist) {
        s.target_dist = t;
        s.target_pred = u;
      }
    }
    for (std::size_t a = adj_offset_[u]; a < adj_offset_[u + 1]; ++a) {
      const Arc& arc = arcs_[a];
      const double nd = d + arc.weight;
      if (nd < s.dist[arc.to]) {
        s.dist[arc.to] = nd;
        s.pred[arc.to] = u;
        s.pred_face[arc.to] = arc.face;
        pq.push({nd, arc.to});
      }
    }
  }
  return s;
}

double MeshSurface::distance(const MeshPoint& p, const MeshPoint& q) const {
  return search(p, &q).target_dist;
}

std::vector<double> MeshSurface::distances_from(const MeshPoint& p) const { return search(p, nullptr).dist; }

MeshSurface::DistanceField MeshSurface::field_from(const MeshPoint& p0) const {
  const MeshPoint p = canonical(p0);
  DistanceField f;
  f.position = position(p);
  for (const auto& pf : incident_faces(p)) f.faces.push_back(pf.face);
  f.dist = search(p, nullptr).dist;
  return f;
}

double MeshSurface::distance_via(const DistanceField& field, const MeshPoint& q0) const {
  const MeshPoint q = canonical(q0);
  const Vec3 qp = position(q);
  double best = kInf;
  for (const auto& qf : incident_faces(q)) {
    if (std::find(field.faces.begin(), field.faces.end(), qf.face) != field.faces.end()) {
      best = std::min(best, dist3(field.position, qp));
    }
    for (std::size_t n : face_nodes_[qf.face]) best = std::min(best, field.dist[n] + dist3(node_pos_[n], qp));
  }
  return best;
}

std::vector<MeshSurface::PathPiece> MeshSurface::shortest_path(const MeshPoint& p0, const MeshPoint& q0) const {
  const MeshPoint p = canonical(p0);
  const MeshPoint q = canonical(q0);
  const Search s = search(p, &q);
  auto bary_of = [&](const MeshPoint& x, std::size_t face) {
    for (const auto& xf : incident_faces(x)) {
      if (xf.face == face) return xf.bary;
    }
    throw Error(ErrorKind::kInvalidArgument, "point is not on the requested face");
  };
  std::vector<PathPiece> out;
  const std::size_t npos = static_cast<std::size_t>(-1);
  if (s.target_pred == npos) {
    if (s.target_dist > 0) {
      out.push_back({s.target_face, bary_of(p, s.target_face), bary_of(q, s.target_face), s.target_dist});
    }
    return out;
  }
  std::vector<std::size_t> chain;
  for (std::size_t n = s.target_pred; n != npos; n = s.pred[n]) chain.push_back(n);
  std::reverse(chain.begin(), chain.end());

  const std::size_t first = chain.front();
  const double d0 = s.dist[first];
  if (d0 > 0) {
    const std::size_t f = s.pred_face[first];
    out.push_back({f, bary_of(p, f), node_bary_in_face(first, f), d0});
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const std::size_t f = s.pred_face[chain[i]];
    out.push_back({f, node_bary_in_face(chain[i - 1], f), node_bary_in_face(chain[i], f),
                   s.dist[chain[i]] - s.dist[chain[i - 1]]});
  }
  const std::size_t last = chain.back();
  const double dl = dist3(node_pos_[last], position(q));
  if (dl > 0) {
    for (const auto& qf : incident_faces(q)) {
      const auto& fn = face_nodes_[qf.face];
      if (std::find(fn.begin(), fn.end(), last) != fn.end()) {
        out.push_back({qf.face, node_bary_in_face(last, qf.face), qf.bary, dl});
        break;
      }
    }
  }
  return out;
}

MeshSurface ellipsoid_mesh(double c, int ring, int bands, int steiner) {
  if (ring < 4 || ring % 4 != 0) throw Error(ErrorKind::kInvalidArgument, "ring must be a positive multiple of 4");
  if (bands < 2 || bands % 2 != 0) throw Error(ErrorKind::kInvalidArgument, "bands must be even and >= 2");
  if (!(c >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "ellipsoid axis must be nonnegative");

  const std::size_t R = static_cast<std::size_t>(ring);
  const std::size_t B = static_cast<std::size_t>(bands);
  std::vector<Vec3> verts;
  verts.push_back({0, 0, c});
  for (std::size_t i = 1; i < B; ++i) {
    const double th = std::numbers::pi * static_cast<double>(i) / static_cast<double>(B);
    for (std::size_t j = 0; j < R; ++j) {
      const double ph = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(R);
      verts.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), c * std::cos(th)});
    }
  }
  verts.push_back({0, 0, -c});
  const std::size_t south = verts.size() - 1;
  auto id = [&](std::size_t i, std::size_t j) { return 1 + (i - 1) * R + j % R; };

  std::vector<std::array<std::size_t, 3>> faces;
  for (std::size_t j = 0; j < R; ++j) {
    faces.push_back({0, id(1, j), id(1, j + 1)});
    faces.push_back({south, id(B - 1, j + 1), id(B - 1, j)});
  }
  for (std::size_t i = 1; i + 1 < B; ++i) {
    for (std::size_t j = 0; j < R; ++j) {
      faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }

  MeshSurface mesh(std::move(verts), std::move(faces), steiner);
  std::vector<std::vector<std::size_t>> seeds;
  std::vector<std::size_t> equator;
  for (std::size_t j = 0; j < R; ++j) equator.push_back(id(B / 2, j));
  seeds.push_back(equator);
  for (std::size_t j0 : {std::size_t{0}, R / 4}) {
    std::vector<std::size_t> meridian = {0};
    for (std::size_t i = 1; i < B; ++i) meridian.push_back(id(i, j0));
    meridian.push_back(south);
    for (std::size_t i = B - 1; i >= 1; --i) meridian.push_back(id(i, j0 + R / 2));
    seeds.push_back(meridian);
  }
  mesh.set_seed_cycles(std::move(seeds));
  return mesh;
}

MeshSurface box_mesh(const Vec3& half, int n, int steiner) {
  if (n < 2 || n % 2 != 0) throw Error(ErrorKind::kInvalidArgument, "box subdivision must be even and >= 2");
  for (double h : half) {
    if (!(h > 0)) throw Error(ErrorKind::kInvalidArgument, "box half-widths must be positive");
  }
  const int N = n;
  std::map<std::array<int, 3>, std::size_t> ids;
  std::vector<Vec3> verts;
  auto id = [&](int i, int j, int l) {
    const std::array<int, 3> key{i, j, l};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    Vec3 x;
    for (int a = 0; a < 3; ++a) x[a] = -half[a] + 2.0 * half[a] * key[a] / N;
    verts.push_back(x);
    ids.emplace(key, verts.size() - 1);
    return verts.size() - 1;
  };
  std::vector<std::array<std::size_t, 3>> faces;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (int side : {0, N}) {
      for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) {
          auto at = [&](int da, int db) {
            std::array<int, 3> k{};
            k[axis] = side;
            k[u] = a + da;
            k[v] = b + db;
            return id(k[0], k[1], k[2]);
          };
          const std::size_t p00 = at(0, 0), p10 = at(1, 0), p11 = at(1, 1), p01 = at(0, 1);
          if (side == N) {
            faces.push_back({p00, p10, p11});
            faces.push_back({p00, p11, p01});
          } else {
            faces.push_back({p00, p11, p10});
            faces.push_back({p00, p01, p11});
          }
        }
      }
    }
  }
  std::vector<std::size_t> equator;
  const int m = N / 2;
  for (int i = 0; i < N; ++i) equator.push_back(id(i, 0, m));
  for (int j = 0; j < N; ++j) equator.push_back(id(N, j, m));
  for (int i = N; i > 0; --i) equator.push_back(id(i, N, m));
  for (int j = N; j > 0; --j) equator.push_back(id(0, j, m));
  MeshSurface mesh(std::move(verts), std::move(faces), steiner);
  mesh.set_seed_cycles({equator});
  return mesh;
}

}  // namespace lsl
