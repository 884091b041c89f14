#include "lsl/energy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lsl/parallel.hpp"

namespace lsl {

namespace {

std::size_t next(std::size_t i, std::size_t k) { return (i + 1) % k; }
std::size_t prev(std::size_t i, std::size_t k) { return (i + k - 1) % k; }

void check_tuple(const ProductPoint& pt) {
  if (!pt.space) throw Error(ErrorKind::kInvalidArgument, "product point without a space");
  if (pt.k() < 2) throw Error(ErrorKind::kInvalidArgument, "a product point needs k >= 2");
  for (const auto& p : pt.points) pt.space->check_point(p);
}

void require_smooth_variant(const LengthSpace& space) {
  if (space.as<FiniteMetric>() || space.as<MeshSurface>()) {
    throw Error(ErrorKind::kUnsupportedVariant, "no energy gradient on a " + space.kind_name());
  }
}

std::vector<double> segment_lengths(const ProductPoint& pt) {
  const std::size_t k = pt.points.size();
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = pt.space->distance(pt.points[i], pt.points[next(i, k)]);
  return d;
}

bool is_collapsed(const ProductPoint& pt) {
  for (double d : segment_lengths(pt)) {
    if (d > 1e-6) return false;
  }
  return true;
}

/// Orthonormal frames at every point of the tuple.
using Frame = std::vector<std::vector<Tangent>>;

Frame frame_at(const ProductPoint& pt) {
  Frame f;
  for (const auto& p : pt.points) f.push_back(tangent_basis(*pt.space, p));
  return f;
}

int frame_dim(const Frame& f) {
  int n = 0;
  for (const auto& b : f) n += static_cast<int>(b.size());
  return n;
}

/// Moves x_i along sum_j xi_{ij} e_{ij}.
ProductPoint retract(const ProductPoint& pt, const Frame& f, const Eigen::VectorXd& xi) {
  ProductPoint out{pt.space, {}};
  int c = 0;
  for (std::size_t i = 0; i < pt.points.size(); ++i) {
    Tangent v(f[i].front().size(), 0.0);
    for (const auto& e : f[i]) {
      for (std::size_t a = 0; a < v.size(); ++a) v[a] += xi[c] * e[a];
      ++c;
    }
    out.points.push_back(exp_map(*pt.space, pt.points[i], v));
  }
  return out;
}

ProductPoint step(const ProductPoint& pt, const std::vector<Tangent>& dir, double t) {
  ProductPoint out{pt.space, {}};
  for (std::size_t i = 0; i < pt.points.size(); ++i) {
    Tangent v = dir[i];
    for (double& x : v) x *= t;
    out.points.push_back(exp_map(*pt.space, pt.points[i], v));
  }
  return out;
}

Eigen::VectorXd coordinates(const std::vector<Tangent>& g, const Frame& f) {
  Eigen::VectorXd out(frame_dim(f));
  int c = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (const auto& e : f[i]) {
      double s = 0;
      for (std::size_t a = 0; a < e.size(); ++a) s += e[a] * g[i][a];
      out[c++] = s;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Energy and gradient
// ---------------------------------------------------------------------------

EnergySpec EnergySpec::uniform(SpaceHandle space, int k) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  return EnergySpec{std::move(space), std::vector<double>(k, 1.0 / k)};
}

double weighted_energy(const EnergySpec& spec, const ProductPoint& pt) {
  check_tuple(pt);
  if (spec.weights.size() != pt.points.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one weight per segment expected");
  }
  const auto d = segment_lengths(pt);
  double e = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(spec.weights[i] > 0)) throw Error(ErrorKind::kInvalidArgument, "weights must be positive");
    e += d[i] * d[i] / spec.weights[i];
  }
  return e;
}

double uniform_energy(const ProductPoint& pt) {
  check_tuple(pt);
  double e = 0;
  for (double d : segment_lengths(pt)) e += d * d;
  return pt.k() * e;
}

std::vector<Tangent> energy_gradient(const ProductPoint& pt) {
  check_tuple(pt);
  require_smooth_variant(*pt.space);
  const std::size_t k = pt.points.size();
  const double c = -2.0 * static_cast<double>(k);
  std::vector<Tangent> g(k);
  try {
    for (std::size_t i = 0; i < k; ++i) {
      Tangent a = log_map(*pt.space, pt.points[i], pt.points[next(i, k)]);
      const Tangent b = log_map(*pt.space, pt.points[i], pt.points[prev(i, k)]);
      for (std::size_t j = 0; j < a.size(); ++j) a[j] = c * (a[j] + b[j]);
      g[i] = std::move(a);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kAmbiguousDirection) throw Error(ErrorKind::kNonsmoothPoint, e.what());
    throw;
  }
  return g;
}

double gradient_norm(const std::vector<Tangent>& g) {
  double s = 0;
  for (const auto& v : g) {
    for (double x : v) s += x * x;
  }
  return std::sqrt(s);
}

SpacePoint random_point(const LengthSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (const auto* c = space.as<Circle>()) return CirclePoint{unit(rng) * c->circumference()};
  if (const auto* t = space.as<FlatTorus>()) {
    TorusPoint p;
    for (std::size_t i = 0; i < t->dimension(); ++i) p.s.push_back(unit(rng) * t->factor(i).circumference());
    return p;
  }
  if (const auto* s = space.as<RoundSphere>()) {
    std::normal_distribution<double> gauss;
    SpherePoint p{std::vector<double>(s->dimension() + 1)};
    double n = 0;
    while (n < 1e-6) {
      n = 0;
      for (double& x : p.x) {
        x = gauss(rng);
        n += x * x;
      }
      n = std::sqrt(n);
    }
    for (double& x : p.x) x /= n;
    return p;
  }
  if (const auto* g = space.as<MetricGraph>()) {
    std::vector<double> w;
    for (const auto& e : g->edges()) w.push_back(e.length);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const std::size_t e = pick(rng);
    const double len = g->edge(e).length;
    return GraphPoint::on_edge(e, len * (0.01 + 0.98 * unit(rng)));
  }
  throw Error(ErrorKind::kUnsupportedVariant, "random points on a " + space.kind_name());
}

// ---------------------------------------------------------------------------
// Optimizers
// ---------------------------------------------------------------------------

DescentResult gradient_descent(const ProductPoint& start, const SearchOptions& opts) {
  DescentResult r;
  r.point = start;
  double e = uniform_energy(r.point);
  r.energies.push_back(e);
  std::vector<Tangent> g;
  try {
    g = energy_gradient(r.point);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kNonsmoothPoint) throw;
    r.nonsmooth = true;
    return r;
  }
  double t = 1.0 / (4.0 * start.k());
  for (r.iterations = 0; r.iterations < opts.max_iter; ++r.iterations) {
    const double gn = gradient_norm(g);
    r.grad_norm = gn;
    if (gn <= opts.tol_grad) {
      r.converged = true;
      return r;
    }
    std::vector<Tangent> dir = g;
    for (auto& v : dir) {
      for (double& x : v) x = -x;
    }
    bool accepted = false;
    for (t = std::min(1.0, 2.0 * t); t > 1e-20; t *= opts.backtrack) {
      try {
        ProductPoint trial = step(r.point, dir, t);
        const double et = uniform_energy(trial);
        if (et > e - 1e-4 * t * gn * gn) continue;
        std::vector<Tangent> gt = energy_gradient(trial);
        r.point = std::move(trial);
        e = et;
        g = std::move(gt);
        accepted = true;
        break;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::kNonsmoothPoint && err.kind() != ErrorKind::kInvalidArgument &&
            err.kind() != ErrorKind::kAmbiguousDirection) {
          throw;
        }
      }
    }
    if (!accepted) break;
    r.energies.push_back(e);
  }
  r.grad_norm = gradient_norm(g);
  r.converged = r.grad_norm <= opts.tol_grad;
  return r;
}

DescentResult critical_point_newton(const ProductPoint& start, const SearchOptions& opts, int max_iter) {
  DescentResult r;
  r.point = start;
  const double h = 1e-6;
  auto coord_grad = [&](const ProductPoint& p, const Frame& f) { return coordinates(energy_gradient(p), f); };
  try {
    Frame f = frame_at(r.point);
    Eigen::VectorXd g = coord_grad(r.point, f);
    r.energies.push_back(uniform_energy(r.point));
    double mu = -1;
    for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
      r.grad_norm = g.norm();
      if (r.grad_norm <= opts.tol_grad) break;
      const int n = static_cast<int>(g.size());
      Eigen::MatrixXd hess(n, n);
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[j] = h;
        hess.col(j) = (coord_grad(retract(r.point, f, e), f) - coord_grad(retract(r.point, f, -e), f)) / (2 * h);
      }
      hess = 0.5 * (hess + hess.transpose()).eval();
      const Eigen::MatrixXd jtj = hess.transpose() * hess;
      const Eigen::VectorXd jtg = hess.transpose() * g;
      if (mu < 0) mu = 1e-3 * std::max(1.0, jtj.diagonal().maxCoeff());
      bool accepted = false;
      for (int tries = 0; tries < 40 && !accepted; ++tries) {
        const Eigen::MatrixXd a = jtj + mu * Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd delta = a.ldlt().solve(-jtg);
        try {
          ProductPoint trial = retract(r.point, f, delta);
          Frame ft = frame_at(trial);
          Eigen::VectorXd gt = coord_grad(trial, ft);
          if (gt.norm() < g.norm()) {
            r.point = std::move(trial);
            f = std::move(ft);
            g = std::move(gt);
            mu = std::max(mu / 3.0, 1e-15);
            accepted = true;
            r.energies.push_back(uniform_energy(r.point));
          }
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::kNonsmoothPoint && err.kind() != ErrorKind::kInvalidArgument &&
              err.kind() != ErrorKind::kAmbiguousDirection) {
            throw;
          }
        }
        if (!accepted) mu *= 4.0;
      }
      if (!accepted) break;
    }
    r.grad_norm = g.norm();
    r.converged = r.grad_norm <= opts.tol_grad;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kNonsmoothPoint) throw;
    r.nonsmooth = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Hessian
// ---------------------------------------------------------------------------

HessianIndex hessian_index(const ProductPoint& pt, double h_fd) {
  check_tuple(pt);
  require_smooth_variant(*pt.space);
  if (!(h_fd > 0)) throw Error(ErrorKind::kInvalidArgument, "finite-difference step must be positive");
  const Frame f = frame_at(pt);
  const int n = frame_dim(f);
  const double e0 = uniform_energy(pt);
  auto energy_at = [&](const Eigen::VectorXd& xi) { return uniform_energy(retract(pt, f, xi)); };
  Eigen::MatrixXd hess(n, n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd ea = Eigen::VectorXd::Zero(n);
    ea[a] = h_fd;
    hess(a, a) = (energy_at(ea) - 2 * e0 + energy_at(-ea)) / (h_fd * h_fd);
    for (int b = a + 1; b < n; ++b) {
      Eigen::VectorXd eb = Eigen::VectorXd::Zero(n);
      eb[b] = h_fd;
      const double v =
          (energy_at(ea + eb) - energy_at(ea - eb) - energy_at(eb - ea) + energy_at(-ea - eb)) / (4 * h_fd * h_fd);
      hess(a, b) = hess(b, a) = v;
    }
  }
  HessianIndex out;
  out.tau = 1e5 * h_fd * h_fd * (1.0 + e0);
  if (!hess.allFinite()) {
    out.ill_conditioned = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess);
  if (solver.info() != Eigen::Success) {
    out.ill_conditioned = true;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    const double lam = solver.eigenvalues()[i];
    out.eigenvalues.push_back(lam);
    if (lam < -out.tau) {
      ++out.index;
    } else if (lam <= out.tau) {
      ++out.nullity;
    }
  }
  if (solver.eigenvalues().cwiseAbs().maxCoeff() > 1e12) out.ill_conditioned = true;
  return out;
}

// ---------------------------------------------------------------------------
// Curves from tuples
// ---------------------------------------------------------------------------

ClosedCurve tuple_to_curve(const ProductPoint& pt) {
  check_tuple(pt);
  return curve_from_breakpoints(pt.space, pt.points);
}

bool is_rotating_critical(const ProductPoint& pt, int n_shifts, double tol) {
  if (n_shifts < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one shift");
  const int k = pt.k();
  try {
    const ClosedCurve c = tuple_to_curve(pt);
    const bool mesh = pt.space->as<MeshSurface>() != nullptr;
    const double seg = c.length() / k;
    for (int j = 0; j < n_shifts; ++j) {
      const double t0 = (kTwoPi / k) * j / n_shifts;
      ProductPoint sample{pt.space, {}};
      for (int i = 0; i < k; ++i) sample.points.push_back(c.eval(t0 + kTwoPi * i / k));
      if (mesh) {
        for (double d : segment_lengths(sample)) {
          if (d < seg - LengthSpace::kMeshHoldTolerance) return false;
        }
      } else if (gradient_norm(energy_gradient(sample)) > tol) {
        return false;
      }
    }
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kNonsmoothPoint || e.kind() == ErrorKind::kAmbiguousDirection) return false;
    throw;
  }
}

bool same_curve(const ClosedCurve& a, const ClosedCurve& b, double tol) {
  if (a.space() != b.space() && a.space()->label() != b.space()->label()) return false;
  const double len = a.length();
  if (std::abs(len - b.length()) > tol * (1.0 + len)) return false;
  const LengthSpace& space = *a.space();
  const SpacePoint a0 = a.at_arclength(0.0);
  auto f = [&](double s) { return space.distance(a0, b.at_arclength(s)); };
  auto matches = [&](double shift) {
    constexpr int kSamples = 32;
    for (int i = 0; i < kSamples; ++i) {
      const double s = len * i / kSamples;
      if (space.distance(a.at_arclength(s), b.at_arclength(s + shift)) > tol * (1.0 + len)) return false;
    }
    return true;
  };
  constexpr int kGrid = 256;
  const double step = b.length() / kGrid;
  std::vector<double> vals(kGrid);
  for (int j = 0; j < kGrid; ++j) vals[j] = f(j * step);
  for (int j = 0; j < kGrid; ++j) {
    const double v = vals[j];
    if (v > vals[(j + kGrid - 1) % kGrid] || v > vals[(j + 1) % kGrid]) continue;
    if (v > 2.0 * step) continue;
    double lo = (j - 1) * step, hi = (j + 1) * step;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = f(x2);
      }
    }
    if (matches(0.5 * (lo + hi))) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

namespace {

enum class Outcome { kFound, kCollapsed, kNonsmooth, kNotConverged };

struct StartResult {
  Outcome outcome = Outcome::kNotConverged;
  DescentResult run;
};

StartResult run_start(const SpaceHandle& space, int k, std::uint64_t seed, std::size_t index,
                      const SearchOptions& opts) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  ProductPoint start{space, {}};
  for (int i = 0; i < k; ++i) start.points.push_back(random_point(*space, rng));

  auto classify = [](const DescentResult& d) {
    if (d.nonsmooth) return Outcome::kNonsmooth;
    if (is_collapsed(d.point)) return Outcome::kCollapsed;
    return d.converged ? Outcome::kFound : Outcome::kNotConverged;
  };
  StartResult r{Outcome::kNotConverged, gradient_descent(start, opts)};
  r.outcome = classify(r.run);
  if (r.outcome == Outcome::kFound) return r;
  DescentResult polished = critical_point_newton(r.outcome == Outcome::kNotConverged ? r.run.point : start, opts);
  if (classify(polished) == Outcome::kFound) return StartResult{Outcome::kFound, std::move(polished)};
  return r;
}

}  // namespace

SearchReport find_critical_points(const SpaceHandle& space, int k, const SearchOptions& opts) {
  if (!space) throw Error(ErrorKind::kInvalidArgument, "no space given");
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  if (opts.n_starts < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one start");
  require_smooth_variant(*space);
  const std::size_t n = static_cast<std::size_t>(opts.n_starts);
  std::vector<StartResult> results(n);
  parallel_chunks(n, n, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) results[i] = run_start(space, k, opts.seed, i, opts);
  });

  SearchReport rep;
  rep.k = k;
  rep.starts = opts.n_starts;
  for (auto& r : results) {
    switch (r.outcome) {
      case Outcome::kCollapsed: ++rep.collapsed; continue;
      case Outcome::kNonsmooth: ++rep.rejected_nonsmooth; continue;
      case Outcome::kNotConverged: ++rep.not_converged; continue;
      case Outcome::kFound: ++rep.converged; break;
    }
    CriticalPointRecord rec;
    rec.point = r.run.point;
    rec.energy = uniform_energy(rec.point);
    rec.grad_norm = r.run.grad_norm;
    const auto d = segment_lengths(rec.point);
    double mean = 0;
    for (double x : d) mean += x / d.size();
    for (double x : d) rec.segment_residual = std::max(rec.segment_residual, std::abs(x - mean) / mean);
    try {
      rec.curve = tuple_to_curve(rec.point);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUnsupportedVariant && e.kind() != ErrorKind::kAmbiguousDirection &&
          e.kind() != ErrorKind::kInvalidArgument) {
        throw;
      }
    }
    bool duplicate = false;
    for (auto& seen : rep.records) {
      if (rec.curve && seen.curve ? same_curve(*seen.curve, *rec.curve)
                                  : std::abs(seen.energy - rec.energy) <= 1e-8 * (1 + rec.energy)) {
        ++seen.multiplicity;
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    rec.rotating = rec.curve && is_rotating_critical(rec.point, opts.n_shifts, opts.tol_rotating);
    if (opts.compute_hessian) rec.hessian = hessian_index(rec.point, opts.h_fd);
    rep.records.push_back(std::move(rec));
  }
  std::stable_sort(rep.records.begin(), rep.records.end(), [](const auto& a, const auto& b) {
    return std::llround(a.energy * 1e6) < std::llround(b.energy * 1e6);
  });
  return rep;
}

OpenIndexSearch open_index_search(const SpaceHandle& space, int k_max, const SearchOptions& opts) {
  if (k_max < 3) throw Error(ErrorKind::kInvalidArgument, "k_max must be at least 3");
  OpenIndexSearch out;
  for (int k = 3; k <= k_max; ++k) {
    SearchOptions o = opts;
    o.seed = opts.seed + static_cast<std::uint64_t>(k);
    out.reports.push_back(find_critical_points(space, k, o));
    const auto& recs = out.reports.back().records;
    if (std::any_of(recs.begin(), recs.end(), [](const auto& r) { return r.rotating && r.energy > 0; })) {
      out.value = k;
      break;
    }
  }
  if (space->as<Circle>()) {
    out.value = 3;
    out.exact = true;
  }
  return out;
}

}  // namespace lsl
