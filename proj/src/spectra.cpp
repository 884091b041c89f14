#include "lsl/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "lsl/parallel.hpp"

namespace lsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int code(const DirectedEdge& d) { return static_cast<int>(2 * d.edge + (d.dir < 0 ? 1 : 0)); }

DirectedEdge from_code(int c) { return {static_cast<std::size_t>(c / 2), c % 2 ? -1 : +1}; }

std::size_t tail(const MetricGraph& g, const DirectedEdge& d) { return d.dir > 0 ? g.edge(d.edge).a : g.edge(d.edge).b; }
std::size_t head(const MetricGraph& g, const DirectedEdge& d) { return d.dir > 0 ? g.edge(d.edge).b : g.edge(d.edge).a; }

std::vector<int> canonical_codes(const std::vector<int>& w) {
  const std::size_t n = w.size();
  std::vector<int> rev(n);
  for (std::size_t i = 0; i < n; ++i) rev[i] = w[n - 1 - i] ^ 1;
  std::vector<int> best;
  for (const std::vector<int>* seq : {&w, static_cast<const std::vector<int>*>(&rev)}) {
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<int> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = (*seq)[(r + i) % n];
      if (best.empty() || cand < best) best = std::move(cand);
    }
  }
  return best;
}

double walk_length(const MetricGraph& g, const std::vector<DirectedEdge>& w) {
  double s = 0;
  for (const auto& d : w) s += g.edge(d.edge).length;
  return s;
}

std::optional<int> min_opt(std::optional<int> a, std::optional<int> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

/// Groups (length, curve) pairs sorted by length into entries whose lengths
/// agree within the length tolerance.
std::vector<SpectrumEntry> group(std::vector<std::pair<double, ClosedCurve>> items) {
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<SpectrumEntry> out;
  for (auto& [len, curve] : items) {
    if (out.empty() || len - out.back().length > kEpsLen) {
      out.push_back(SpectrumEntry{len, std::nullopt, std::nullopt, false, {}});
    }
    out.back().witnesses.push_back(std::move(curve));
  }
  return out;
}

double default_R(const SpaceHandle& space, int k) { return k * diameter(*space, 0.05) + kEpsLen; }

// Closed-form families on analytic spaces ----------------------------------

struct AnalyticGeodesic {
  double length;
  int minind;
  std::function<ClosedCurve()> make;
};

std::vector<AnalyticGeodesic> analytic_geodesics(const SpaceHandle& space, double R) {
  std::vector<AnalyticGeodesic> out;
  if (const auto* c = space->as<Circle>()) {
    for (int a = 1; 2 * c->diameter() * a <= R + kEpsLen; ++a) {
      out.push_back({2 * c->diameter() * a, 2 * a, [space, a] { return circle_loop(space, a); }});
    }
  } else if (const auto* s = space->as<RoundSphere>()) {
    const std::size_t n = static_cast<std::size_t>(s->dimension() + 1);
    SpherePoint x{std::vector<double>(n, 0.0)};
    Tangent u(n, 0.0);
    x.x[0] = 1.0;
    u[1] = 1.0;
    for (int a = 1; kTwoPi * a <= R + kEpsLen; ++a) {
      out.push_back({kTwoPi * a, 2 * a, [space, x, u, a] { return great_circle(space, x, u, a); }});
    }
  } else if (const auto* t = space->as<FlatTorus>()) {
    const std::size_t m = t->dimension();
    std::vector<long> bound(m);
    for (std::size_t i = 0; i < m; ++i) bound[i] = static_cast<long>(std::floor(R / t->factor(i).circumference() + 1e-9));
    std::vector<long> n(m);
    for (std::size_t i = 0; i < m; ++i) n[i] = -bound[i];
    while (true) {
      // Keep one representative of +-n: first nonzero coordinate positive.
      std::size_t lead = 0;
      while (lead < m && n[lead] == 0) ++lead;
      if (lead < m && n[lead] > 0) {
        double sq = 0;
        long mx = 0;
        for (std::size_t i = 0; i < m; ++i) {
          const double v = static_cast<double>(n[i]) * t->factor(i).circumference();
          sq += v * v;
          mx = std::max(mx, std::labs(n[i]));
        }
        const double len = std::sqrt(sq);
        if (len <= R + kEpsLen) {
          out.push_back({len, static_cast<int>(2 * mx), [space, n] { return torus_geodesic(space, n); }});
        }
      }
      std::size_t i = 0;
      while (i < m && ++n[i] > bound[i]) {
        n[i] = -bound[i];
        ++i;
      }
      if (i == m) break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.length < b.length; });
  return out;
}

bool is_analytic(const LengthSpace& s) { return s.as<Circle>() || s.as<RoundSphere>() || s.as<FlatTorus>(); }

/// Analytic spectra. Every family member has injrad = L / minind, hence
/// opind = minind + 1.
Spectrum analytic_spectrum(const SpaceHandle& space, std::optional<int> k, bool open_only, double R) {
  Spectrum sp{space, k, open_only, R, {}, {}, true};
  std::vector<SpectrumEntry> entries;
  for (const auto& g : analytic_geodesics(space, R)) {
    const int opind = g.minind + 1;
    if (k && !open_only && g.minind > *k) continue;
    if (k && open_only && opind > *k) continue;
    if (entries.empty() || g.length - entries.back().length > kEpsLen) {
      entries.push_back(SpectrumEntry{g.length, std::nullopt, std::nullopt, false, {}});
    }
    auto& e = entries.back();
    e.minind = min_opt(e.minind, g.minind);
    e.opind = min_opt(e.opind, opind);
    if (k && opind <= *k) e.open = true;
    e.witnesses.push_back(g.make());
  }
  sp.entries = std::move(entries);
  return sp;
}

// Candidate curves on graphs and meshes ------------------------------------

std::vector<std::pair<double, ClosedCurve>> mesh_candidates(const SpaceHandle& space, double R) {
  const auto& mesh = *space->as<MeshSurface>();
  std::vector<std::pair<double, ClosedCurve>> out;
  for (const auto& cycle : mesh.seed_cycles()) {
    const ClosedCurve base = mesh_vertex_cycle(space, cycle);
    for (int n = 1; n * base.length() <= R + kEpsLen; ++n) {
      out.push_back({n * base.length(), n == 1 ? base : iterate(base, n)});
    }
  }
  return out;
}

std::vector<std::pair<double, ClosedCurve>> graph_candidates(const SpaceHandle& space, double R) {
  auto en = enumerate_graph_geodesics(space, R);
  std::vector<std::pair<double, ClosedCurve>> out;
  for (auto& c : en.curves) out.push_back({c.length(), std::move(c)});
  return out;
}

int graph_index_bound(const ClosedCurve& c) {
  return std::max(2, static_cast<int>(std::ceil(c.length() / c.min_run_length() - 1e-12)) + 1);
}

/// Spectrum from explicit candidate curves, filtered by the 1/k (or openly
/// 1/k) condition when k is given.
Spectrum filtered_spectrum(const SpaceHandle& space, std::optional<int> k, bool open_only, double R,
                           std::vector<std::pair<double, ClosedCurve>> cands, bool complete,
                           const CheckOptions& opts) {
  Spectrum sp{space, k, open_only, R, {}, {}, complete};
  const bool graph = space->as<MetricGraph>() != nullptr;
  struct Judged {
    bool keep = false;
    bool undecided = false;
    bool open = false;
    std::optional<int> minind, opind;
  };
  std::vector<Judged> judged(cands.size());
  parallel_chunks(cands.size(), cands.size(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const ClosedCurve& c = cands[i].second;
      Judged& j = judged[i];
      const int k_max = graph ? graph_index_bound(c) : 16;
      if (k) {
        const auto r = check_one_over_k(c, *k, opts);
        if (r.verdict == Verdict::kInconclusive) {
          j.undecided = true;
          continue;
        }
        if (r.verdict != Verdict::kHolds) continue;
        const auto mi = minimizing_index(c, *k, opts);
        j.minind = mi.value;
        const double rho = curve_injrad(c, opts).value;
        const double slack = graph ? kEpsLen : c.length() / kPi * opts.delta;
        j.open = rho > c.length() / *k + slack;
        if (open_only && !j.open) continue;
        j.keep = true;
        if (j.open) j.opind = open_index(c, *k, opts).value;
      } else {
        if (!is_closed_geodesic(c, opts)) continue;
        j.keep = true;
        j.minind = minimizing_index(c, k_max, opts).value;
        j.opind = open_index(c, k_max + 1, opts).value;
      }
    }
  });
  std::vector<std::pair<double, ClosedCurve>> kept, pending;
  std::vector<Judged> kept_j;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (judged[i].keep) {
      kept.push_back(cands[i]);
      kept_j.push_back(judged[i]);
    } else if (judged[i].undecided) {
      pending.push_back(cands[i]);
    }
  }
  // Group while carrying the per-witness metadata along.
  std::vector<std::size_t> order(kept.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return kept[a].first < kept[b].first; });
  for (std::size_t i : order) {
    if (sp.entries.empty() || kept[i].first - sp.entries.back().length > kEpsLen) {
      sp.entries.push_back(SpectrumEntry{kept[i].first, std::nullopt, std::nullopt, false, {}});
    }
    auto& e = sp.entries.back();
    e.minind = min_opt(e.minind, kept_j[i].minind);
    e.opind = min_opt(e.opind, kept_j[i].opind);
    e.open = e.open || kept_j[i].open;
    e.witnesses.push_back(kept[i].second);
  }
  sp.undecided = group(std::move(pending));
  return sp;
}

}  // namespace

std::vector<double> Spectrum::lengths() const {
  std::vector<double> out;
  for (const auto& e : entries) out.push_back(e.length);
  return out;
}

std::vector<DirectedEdge> canonical_walk(const std::vector<DirectedEdge>& walk) {
  std::vector<int> codes;
  for (const auto& d : walk) codes.push_back(code(d));
  std::vector<DirectedEdge> out;
  for (int c : canonical_codes(codes)) out.push_back(from_code(c));
  return out;
}

GeodesicEnumeration enumerate_graph_geodesics(const SpaceHandle& space, double R, std::size_t cap) {
  const auto* g = space->as<MetricGraph>();
  if (!g) throw Error(ErrorKind::kMismatchedVariant, "geodesic enumeration needs a metric graph");
  if (!(R > 0.0)) throw Error(ErrorKind::kInvalidArgument, "truncation radius must be positive");
  const int n_dir = static_cast<int>(2 * g->edges().size());
  std::vector<std::vector<int>> out_codes(g->num_vertices());
  for (int c = 0; c < n_dir; ++c) out_codes[tail(*g, from_code(c))].push_back(c);
  const double limit = R + kEpsLen;

  std::vector<std::set<std::vector<int>>> found(static_cast<std::size_t>(n_dir));
  std::vector<std::size_t> explored(static_cast<std::size_t>(n_dir), 0);
  parallel_chunks(static_cast<std::size_t>(n_dir), static_cast<std::size_t>(n_dir),
                  [&](std::size_t b, std::size_t e, std::size_t) {
                    for (std::size_t c0 = b; c0 < e; ++c0) {
                      const int first = static_cast<int>(c0);
                      const std::size_t start = tail(*g, from_code(first));
                      std::vector<int> walk = {first};
                      std::size_t& count = explored[c0];
                      std::function<void(double)> dfs = [&](double len) {
                        const int last = walk.back();
                        const std::size_t h = head(*g, from_code(last));
                        if (h == start && (last ^ 1) != first) found[c0].insert(canonical_codes(walk));
                        for (int c : out_codes[h]) {
                          if (c < first || c == (last ^ 1)) continue;
                          const DirectedEdge d = from_code(c);
                          const double nl = len + g->edge(d.edge).length;
                          if (nl + g->vertex_distance(head(*g, d), start) > limit) continue;
                          if (++count > cap) {
                            throw Error(ErrorKind::kCombinatorialBlowup, "walk count exceeds the enumeration cap");
                          }
                          walk.push_back(c);
                          dfs(nl);
                          walk.pop_back();
                        }
                      };
                      const double l0 = g->edge(from_code(first).edge).length;
                      if (l0 + g->vertex_distance(head(*g, from_code(first)), start) <= limit) dfs(l0);
                    }
                  });
  std::size_t total = 0;
  for (auto c : explored) total += c;
  if (total > cap) throw Error(ErrorKind::kCombinatorialBlowup, "walk count exceeds the enumeration cap");

  std::set<std::vector<int>> all;
  for (auto& s : found) all.insert(s.begin(), s.end());
  std::vector<std::pair<double, std::vector<DirectedEdge>>> walks;
  for (const auto& codes : all) {
    std::vector<DirectedEdge> w;
    for (int c : codes) w.push_back(from_code(c));
    walks.push_back({walk_length(*g, w), std::move(w)});
  }
  std::stable_sort(walks.begin(), walks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  GeodesicEnumeration en{space, R, {}, {}, true};
  for (auto& [len, w] : walks) {
    en.curves.push_back(graph_walk(space, w));
    en.walks.push_back(std::move(w));
  }
  return en;
}

Spectrum spectrum(const SpaceHandle& space, double R, const CheckOptions& opts) {
  if (!(R > 0.0)) throw Error(ErrorKind::kInvalidArgument, "truncation radius must be positive");
  if (is_analytic(*space)) return analytic_spectrum(space, std::nullopt, false, R);
  if (space->as<FiniteMetric>()) return Spectrum{space, std::nullopt, false, R, {}, {}, true};
  if (space->as<MetricGraph>()) return filtered_spectrum(space, std::nullopt, false, R, graph_candidates(space, R), true, opts);
  return filtered_spectrum(space, std::nullopt, false, R, mesh_candidates(space, R), false, opts);
}

Spectrum spectrum_1_over_k(const SpaceHandle& space, int k, std::optional<double> R, const CheckOptions& opts) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  const double r = R.value_or(default_R(space, k));
  if (!(r > 0.0)) throw Error(ErrorKind::kInvalidArgument, "truncation radius must be positive");
  if (is_analytic(*space)) return analytic_spectrum(space, k, false, r);
  if (space->as<FiniteMetric>()) return Spectrum{space, k, false, r, {}, {}, true};
  if (space->as<MetricGraph>()) return filtered_spectrum(space, k, false, r, graph_candidates(space, r), true, opts);
  return filtered_spectrum(space, k, false, r, mesh_candidates(space, r), false, opts);
}

Spectrum spectrum_open_1_over_k(const SpaceHandle& space, int k, std::optional<double> R, const CheckOptions& opts) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  const double r = R.value_or(default_R(space, k));
  if (k == 2 || space->as<FiniteMetric>()) return Spectrum{space, k, true, r, {}, {}, true};
  if (is_analytic(*space)) return analytic_spectrum(space, k, true, r);
  if (space->as<MetricGraph>()) return filtered_spectrum(space, k, true, r, graph_candidates(space, r), true, opts);
  return filtered_spectrum(space, k, true, r, mesh_candidates(space, r), false, opts);
}

namespace {

/// Distance between u and v in the graph with edge `skip` removed.
double distance_without(const MetricGraph& g, std::size_t u, std::size_t v, std::size_t skip) {
  std::vector<double> d(g.num_vertices(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[u] = 0;
  pq.push({0, u});
  while (!pq.empty()) {
    auto [du, x] = pq.top();
    pq.pop();
    if (du > d[x]) continue;
    if (x == v) return du;
    for (auto [e, dir] : g.incidence()[x]) {
      if (e == skip) continue;
      const std::size_t y = dir > 0 ? g.edge(e).b : g.edge(e).a;
      if (du + g.edge(e).length < d[y]) {
        d[y] = du + g.edge(e).length;
        pq.push({d[y], y});
      }
    }
  }
  return d[v];
}

double shortest_cycle(const MetricGraph& g) {
  double best = kInf;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& ed = g.edge(e);
    best = std::min(best, ed.length + (ed.a == ed.b ? 0.0 : distance_without(g, ed.a, ed.b, e)));
  }
  return best;
}

}  // namespace

Systole systole(const SpaceHandle& space) {
  const auto* g = space->as<MetricGraph>();
  if (!g) throw Error(ErrorKind::kMismatchedVariant, "systole is computed on metric graphs");
  if (g->first_betti() == 0) throw Error(ErrorKind::kSystoleUndefined, "the graph is a tree");
  const double len = shortest_cycle(*g);
  auto en = enumerate_graph_geodesics(space, len);
  return Systole{en.curves.front().length(), en.curves.front()};
}

std::optional<double> space_injrad(const LengthSpace& space) {
  if (const auto* c = space.as<Circle>()) return c->diameter();
  if (const auto* t = space.as<FlatTorus>()) {
    double m = kInf;
    for (std::size_t i = 0; i < t->dimension(); ++i) m = std::min(m, t->factor(i).diameter());
    return m;
  }
  if (space.as<RoundSphere>()) return kPi;
  if (const auto* g = space.as<MetricGraph>()) {
    if (g->first_betti() == 0) return kInf;
    return shortest_cycle(*g) / 2;
  }
  return std::nullopt;
}

CheckOptions mesh_check_options() {
  CheckOptions o;
  o.delta = kTwoPi / 256;
  o.delta_floor = kTwoPi / 4096;
  return o;
}

SpaceIndex space_minind(const SpaceHandle& space, int k_max, const CheckOptions& opts) {
  if (k_max < 2) throw Error(ErrorKind::kInvalidArgument, "k_max must be at least 2");
  SpaceIndex out;
  if (space->as<FiniteMetric>()) return out;
  if (is_analytic(*space)) {
    const auto fams = analytic_geodesics(space, 2 * diameter(*space, 0.05) + kEpsLen);
    for (const auto& g : fams) {
      if (g.minind == 2) {
        out.value = 2;
        out.witness = g.make();
        return out;
      }
    }
    return out;
  }
  if (const auto* g = space->as<MetricGraph>()) {
    if (g->first_betti() == 0) return out;
    for (int k = 2; k <= k_max; ++k) {
      const auto sp = spectrum_1_over_k(space, k, std::nullopt, opts);
      if (!sp.entries.empty()) {
        out.value = k;
        out.witness = sp.entries.front().witnesses.front();
        return out;
      }
    }
    return out;
  }
  out.heuristic = true;
  const auto& mesh = *space->as<MeshSurface>();
  for (const auto& cycle : mesh.seed_cycles()) {
    const ClosedCurve c = mesh_vertex_cycle(space, cycle);
    const auto mi = minimizing_index(c, k_max, opts);
    if (mi.value && (!out.value || *mi.value < *out.value)) {
      out.value = mi.value;
      out.witness = c;
    }
  }
  return out;
}

LengthBounds min_length_bounds(const SpaceHandle& space, int k_max, const CheckOptions& opts) {
  const SpaceIndex si = space_minind(space, k_max, opts);
  if (!si.value) throw Error(ErrorKind::kInvalidArgument, "no 1/k geodesic with k <= k_max was found");
  LengthBounds b;
  b.k = *si.value;
  b.heuristic = si.heuristic;
  b.diameter = diameter(*space, 0.05);
  if (const auto* c = space->as<Circle>()) {
    b.upper = c->circumference();
  } else if (const auto* t = space->as<FlatTorus>()) {
    b.upper = kInf;
    for (std::size_t i = 0; i < t->dimension(); ++i) b.upper = std::min(b.upper, t->factor(i).circumference());
  } else if (space->as<RoundSphere>()) {
    b.upper = kTwoPi;
  } else if (space->as<MetricGraph>()) {
    b.upper = systole(space).length;
  } else {
    b.upper = si.witness->length();
    for (const auto& e : spectrum(space, si.witness->length() * 4, opts).entries) b.upper = std::min(b.upper, e.length);
  }
  const auto inj = space_injrad(*space);
  if (inj) {
    const auto spk = spectrum_1_over_k(space, b.k, std::nullopt, opts);
    double lk = kInf;
    if (!spk.entries.empty()) lk = spk.entries.front().length;
    b.lower = std::min(b.k * *inj, lk);
  }
  return b;
}

}  // namespace lsl
