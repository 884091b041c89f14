#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "lsl/spectra.hpp"
#include "oracles/graph_oracle.hpp"

namespace oracle {

inline lsl::SpaceHandle to_library(const Graph& g) {
  std::vector<std::string> names;
  for (int v = 0; v < g.n; ++v) names.push_back("v" + std::to_string(v));
  std::vector<lsl::GraphEdge> edges;
  for (const auto& e : g.edges)
    edges.push_back({static_cast<std::size_t>(e.a), static_cast<std::size_t>(e.b), to_double(e.len)});
  return lsl::make_graph(std::move(names), std::move(edges), g.name);
}

struct Equivalence {
  int graphs = 0;
  /// Spectra compared (one full spectrum and one per k).
  int comparisons = 0;
  std::vector<std::string> mismatches;
};

inline std::string show(const std::set<Q>& s) {
  std::ostringstream o;
  o << "{";
  for (auto it = s.begin(); it != s.end(); ++it) o << (it == s.begin() ? "" : ", ") << *it;
  o << "}";
  return o.str();
}

/// Truncation used for graph g: 3 * (lower bound on the diameter), capped.
inline Q suite_radius(const Oracle& o, const Q& cap) { return std::min(cap, 3 * o.diameter_lower_bound()); }

/// Walk classes, the full spectrum and the 1/k spectra (k = 2..k_max) of the
/// library against the oracle, exactly.
inline Equivalence check_graph_suite(const std::vector<Graph>& suite, int k_max = 4, Q cap = Q(9)) {
  Equivalence out;
  for (const auto& g : suite) {
    const Oracle o(g);
    if (!o.connected()) continue;
    ++out.graphs;
    const auto space = to_library(g);
    const Q R = suite_radius(o, cap);
    const double Rd = to_double(R);
    auto fail = [&](const std::string& what) { out.mismatches.push_back(g.name + ": " + what); };

    std::set<Walk> want_walks;
    for (const auto& w : o.closed_geodesics(R)) want_walks.insert(w);
    std::set<Walk> got_walks;
    for (const auto& w : lsl::enumerate_graph_geodesics(space, Rd).walks) {
      Walk ow;
      for (const auto& d : w) ow.push_back({static_cast<int>(d.edge), d.dir});
      got_walks.insert(Oracle::canonical(ow));
    }
    if (got_walks != want_walks)
      fail("walk classes " + std::to_string(got_walks.size()) + " vs " + std::to_string(want_walks.size()));

    auto exact_set = [](const lsl::Spectrum& s) {
      std::set<Q> r;
      for (double l : s.lengths()) r.insert(exact(l));
      return r;
    };
    ++out.comparisons;
    const auto full = exact_set(lsl::spectrum(space, Rd));
    const auto want_full = o.spectrum(R);
    if (full != want_full) fail("spectrum " + show(full) + " vs " + show(want_full));
    for (int k = 2; k <= k_max; ++k) {
      ++out.comparisons;
      const auto s = lsl::spectrum_1_over_k(space, k, Rd);
      const auto got = exact_set(s);
      const auto want = o.spectrum_one_over_k(k, R);
      if (got != want || !s.undecided.empty())
        fail("k=" + std::to_string(k) + " " + show(got) + " vs " + show(want));
    }
  }
  return out;
}

}  // namespace oracle
