#pragma once

// Randomized invariant suites over graphs, flat tori and round spheres.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lsl/energy.hpp"
#include "lsl/spectra.hpp"
#include "oracles/graph_equivalence.hpp"

namespace props {

using namespace lsl;

struct PropertyResult {
  std::string name;
  int instances = 0;
  std::vector<std::string> failures;

  bool passed(int min_instances) const { return instances >= min_instances && failures.empty(); }
};

enum class Family { kGraph, kTorus, kSphere };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::kGraph: return "graph";
    case Family::kTorus: return "torus";
    case Family::kSphere: return "sphere";
  }
  return "?";
}

inline constexpr Family kFamilies[] = {Family::kGraph, Family::kTorus, Family::kSphere};

struct CurveSample {
  std::string desc;
  ClosedCurve curve;
};

struct SpaceSample {
  std::string desc;
  SpaceHandle space;
};

/// Random spaces and closed geodesics. Graph curves come from the oracle
/// generator suite (graphs with cycles only).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {
    for (const auto& g : oracle::generator_suite()) {
      const oracle::Oracle o(g);
      if (!o.connected() || g.edges.size() + 1 <= static_cast<std::size_t>(g.n)) continue;
      graphs_.push_back(oracle::to_library(g));
    }
  }

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  SpaceSample space(Family f) {
    switch (f) {
      case Family::kGraph: {
        const auto& g = graphs_[static_cast<std::size_t>(integer(0, static_cast<int>(graphs_.size()) - 1))];
        return {"graph " + g->label(), g};
      }
      case Family::kTorus: {
        std::vector<double> d;
        const int dim = integer(1, 3) == 3 ? 3 : 2;
        for (int i = 0; i < dim; ++i) d.push_back(uniform(0.5, 3.0));
        std::ostringstream s;
        s << "torus";
        for (double x : d) s << " " << x;
        return {s.str(), make_torus(d)};
      }
      case Family::kSphere: {
        const int n = integer(1, 4) == 4 ? 3 : 2;
        return {"sphere" + std::to_string(n), make_sphere(n)};
      }
    }
    return {};
  }

  CurveSample curve(Family f) {
    switch (f) {
      case Family::kGraph: {
        const auto s = space(f);
        const auto& en = enumeration(s.space);
        const auto& c = en.curves[static_cast<std::size_t>(integer(0, static_cast<int>(en.curves.size()) - 1))];
        std::ostringstream d;
        d << s.desc << " walk of length " << c.length();
        return {d.str(), c};
      }
      case Family::kTorus: {
        const auto s = space(f);
        const auto* t = s.space->as<FlatTorus>();
        std::vector<long> lat(t->dimension(), 0);
        while (std::all_of(lat.begin(), lat.end(), [](long x) { return x == 0; }))
          for (auto& x : lat) x = integer(-2, 2);
        TorusPoint start;
        for (std::size_t i = 0; i < t->dimension(); ++i) start.s.push_back(uniform(0, t->factor(i).circumference()));
        std::ostringstream d;
        d << s.desc << " lattice";
        for (long x : lat) d << " " << x;
        return {d.str(), torus_geodesic(s.space, lat, start)};
      }
      case Family::kSphere: {
        const auto s = space(f);
        const int n = s.space->as<RoundSphere>()->dimension();
        std::normal_distribution<double> g;
        std::vector<double> x(n + 1), v(n + 1);
        for (auto& c : x) c = g(rng_);
        for (auto& c : v) c = g(rng_);
        normalize(x);
        double dot = 0;
        for (int i = 0; i <= n; ++i) dot += x[i] * v[i];
        for (int i = 0; i <= n; ++i) v[i] -= dot * x[i];
        normalize(v);
        const int turns = integer(1, 3);
        return {s.desc + " great circle x" + std::to_string(turns), great_circle(s.space, SpherePoint{x}, v, turns)};
      }
    }
    throw std::logic_error("family");
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  static void normalize(std::vector<double>& v) {
    double n = 0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    for (double& c : v) c /= n;
  }

  const GeodesicEnumeration& enumeration(const SpaceHandle& g) {
    auto it = enum_.find(g.get());
    if (it == enum_.end()) {
      const double R = std::min(9.0, 3 * diameter(*g, 0.0));
      it = enum_.emplace(g.get(), enumerate_graph_geodesics(g, R)).first;
    }
    return it->second;
  }

  std::mt19937_64 rng_;
  std::vector<SpaceHandle> graphs_;
  std::map<const LengthSpace*, GeodesicEnumeration> enum_;
};

inline bool contains(const std::vector<double>& set, double x, double tol = 1e-9) {
  return std::any_of(set.begin(), set.end(), [&](double y) { return std::abs(x - y) <= tol; });
}

inline std::string subset_failure(const std::vector<double>& a, const std::vector<double>& b) {
  for (double x : a)
    if (!contains(b, x)) {
      std::ostringstream s;
      s << x << " missing";
      return s.str();
    }
  return {};
}

/// Slack of grid-based checks on a curve (0 on graphs).
inline double slack(const ClosedCurve& c) { return c.space()->as<MetricGraph>() ? kEpsLen : c.length() / kPi * CheckOptions{}.delta; }

// ---------------------------------------------------------------------------

/// Holds at k implies holds at k + 1, for curves and for spectra.
inline PropertyResult nesting(Sampler& s, int per_family) {
  PropertyResult r{"nesting"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      const auto c = s.curve(f);
      const int k = s.integer(2, 6);
      ++r.instances;
      if (check_one_over_k(c.curve, k).verdict == Verdict::kHolds &&
          check_one_over_k(c.curve, k + 1).verdict != Verdict::kHolds)
        r.failures.push_back(c.desc + ": holds at k=" + std::to_string(k) + " but not k+1");
    }
    for (int i = 0; i < per_family / 4; ++i) {
      const auto sp = s.space(f);
      const int k = s.integer(2, 4);
      const double R = f == Family::kGraph ? std::min(9.0, 3 * diameter(*sp.space, 0.0)) : s.uniform(6.0, 14.0);
      ++r.instances;
      const auto e = subset_failure(spectrum_1_over_k(sp.space, k, R).lengths(),
                                    spectrum_1_over_k(sp.space, k + 1, R).lengths());
      if (!e.empty()) r.failures.push_back(sp.desc + " k=" + std::to_string(k) + ": " + e);
    }
  }
  return r;
}

/// Entries of the 1/k spectrum never exceed k * diameter, even when R is larger;
/// a curve with minimizing index k has L / k <= diameter.
inline PropertyResult diameter_truncation(Sampler& s, int per_family) {
  PropertyResult r{"diameter truncation"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family / 4; ++i) {
      const auto sp = s.space(f);
      const double diam = diameter(*sp.space, 0.0);
      const int k = f == Family::kGraph ? 2 : s.integer(2, 4);
      const double R = f == Family::kGraph ? std::min(9.0, 3 * diam) : (k + 2) * diam;
      ++r.instances;
      for (double l : spectrum_1_over_k(sp.space, k, R).lengths())
        if (l > k * diam + kEpsLen) {
          std::ostringstream m;
          m << sp.desc << " k=" << k << ": entry " << l << " > " << k * diam;
          r.failures.push_back(m.str());
        }
    }
    for (int i = 0; i < per_family; ++i) {
      const auto c = s.curve(f);
      const auto mi = minimizing_index(c.curve, 24);
      if (!mi.value) continue;
      ++r.instances;
      const double diam = diameter(*c.curve.space(), 0.0);
      if (c.curve.length() / *mi.value > diam + slack(c.curve))
        r.failures.push_back(c.desc + ": L/minind exceeds the diameter");
    }
  }
  return r;
}

/// L_{1/(k-1)} in L^open_{1/k} in L_{1/k}; L^open_{1/2} is empty.
inline PropertyResult back_sandwich(Sampler& s, int per_family) {
  PropertyResult r{"back sandwich"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      const auto sp = s.space(f);
      const int k = s.integer(2, 5);
      const double R = f == Family::kGraph ? std::min(9.0, 3 * diameter(*sp.space, 0.0)) : s.uniform(6.0, 14.0);
      ++r.instances;
      const auto open = spectrum_open_1_over_k(sp.space, k, R).lengths();
      const std::string tag = sp.desc + " k=" + std::to_string(k) + ": ";
      if (k == 2) {
        if (!open.empty()) r.failures.push_back(tag + "open 1/2 spectrum not empty");
        continue;
      }
      const auto lower = spectrum_1_over_k(sp.space, k - 1, R).lengths();
      const auto upper = spectrum_1_over_k(sp.space, k, R).lengths();
      if (auto e = subset_failure(lower, open); !e.empty()) r.failures.push_back(tag + "lower " + e);
      if (auto e = subset_failure(open, upper); !e.empty()) r.failures.push_back(tag + "upper " + e);
    }
  }
  return r;
}

/// L / minind <= injrad < L / (minind - 1).
inline PropertyResult injrad_sandwich(Sampler& s, int per_family) {
  PropertyResult r{"injectivity radius sandwich"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      const auto c = s.curve(f);
      const auto mi = minimizing_index(c.curve, 24);
      if (!mi.value) continue;
      ++r.instances;
      const auto rho = curve_injrad(c.curve);
      const double L = c.curve.length();
      const int k = *mi.value;
      const double tol = std::max(rho.error, slack(c.curve));
      if (L / k > rho.value + tol || !(rho.value < L / (k - 1) + tol)) {
        std::ostringstream m;
        m << c.desc << ": minind " << k << " injrad " << rho.value << " L " << L;
        r.failures.push_back(m.str());
      }
    }
  }
  return r;
}

/// minind(iterate(c, n)) in [n (m - 1), n m] and >= 2n.
inline PropertyResult iteration_interval(Sampler& s, int per_family) {
  PropertyResult r{"iteration interval"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      const auto c = s.curve(f);
      const int n = s.integer(2, 4);
      const auto m = minimizing_index(c.curve, 12);
      if (!m.value) continue;
      ++r.instances;
      const auto mn = minimizing_index(iterate(c.curve, n), n * *m.value + 1);
      const int lo = std::max(n * (*m.value - 1), 2 * n);
      const int hi = n * *m.value;
      if (!mn.value || *mn.value < lo || *mn.value > hi) {
        std::ostringstream msg;
        msg << c.desc << " n=" << n << ": minind " << *m.value << " -> "
            << (mn.value ? std::to_string(*mn.value) : std::string("none"));
        r.failures.push_back(msg.str());
      }
    }
  }
  return r;
}

/// minind <= opind <= minind + 1.
inline PropertyResult index_gap(Sampler& s, int per_family) {
  PropertyResult r{"index gap"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      const auto c = s.curve(f);
      const auto m = minimizing_index(c.curve, 24);
      const auto o = open_index(c.curve, 25);
      if (!m.value) continue;
      ++r.instances;
      if (!o.value || *o.value < *m.value || *o.value > *m.value + 1) {
        std::ostringstream msg;
        msg << c.desc << ": minind " << *m.value << " opind " << (o.value ? std::to_string(*o.value) : "none");
        r.failures.push_back(msg.str());
      }
    }
  }
  return r;
}

/// Equally spaced samples of an openly 1/k geodesic form a rotating critical
/// tuple, and every accepted one has energy L^2.
inline PropertyResult energy_length(Sampler& s, int per_family) {
  PropertyResult r{"energy-length identity"};
  for (Family f : kFamilies) {
    for (int i = 0; i < per_family; ++i) {
      const auto c = s.curve(f);
      const auto o = open_index(c.curve, 16);
      if (!o.value) continue;
      ++r.instances;
      const int k = std::max(3, *o.value) + s.integer(0, 2);
      const double t0 = s.uniform(0, kTwoPi);
      ProductPoint pt{c.curve.space(), {}};
      for (int j = 0; j < k; ++j) pt.points.push_back(c.curve.eval(t0 + kTwoPi * j / k));
      const std::string tag = c.desc + " k=" + std::to_string(k) + ": ";
      try {
        if (!is_rotating_critical(pt)) {
          r.failures.push_back(tag + "samples not accepted as rotating");
          continue;
        }
        const double E = uniform_energy(pt);
        const double L = tuple_to_curve(pt).length();
        if (std::abs(E - L * L) > 1e-8 * L * L) r.failures.push_back(tag + "energy differs from L^2");
        if (std::abs(L - c.curve.length()) > 1e-8 * L) r.failures.push_back(tag + "induced length differs");
      } catch (const Error& e) {
        r.failures.push_back(tag + e.what());
      }
    }
  }
  return r;
}

inline std::vector<PropertyResult> run_all(std::uint64_t seed = 17, int per_family = 80) {
  Sampler s(seed);
  return {nesting(s, per_family),       diameter_truncation(s, per_family), back_sandwich(s, per_family),
          injrad_sandwich(s, per_family), iteration_interval(s, per_family), index_gap(s, per_family),
          energy_length(s, per_family)};
}

}  // namespace props
