#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lsl/curves.hpp"

namespace lsl {

/// A k-tuple of points (x_1, ..., x_k), read cyclically.
struct ProductPoint {
  SpaceHandle space;
  std::vector<SpacePoint> points;

  int k() const { return static_cast<int>(points.size()); }
};

/// Segment weights r_i for E = sum d(x_i, x_{i+1})^2 / r_i.
struct EnergySpec {
  SpaceHandle space;
  std::vector<double> weights;

  static EnergySpec uniform(SpaceHandle space, int k);
};

double weighted_energy(const EnergySpec& spec, const ProductPoint& pt);
/// k * sum_i d(x_i, x_{i+1})^2.
double uniform_energy(const ProductPoint& pt);
/// Per-point gradient -2k (log(x_i, x_{i+1}) + log(x_i, x_{i-1})).
/// Throws kNonsmoothPoint when a neighbour sits in the cut locus.
std::vector<Tangent> energy_gradient(const ProductPoint& pt);
double gradient_norm(const std::vector<Tangent>& g);

/// Uniformly distributed point (graphs: edge chosen by length).
SpacePoint random_point(const LengthSpace& space, std::mt19937_64& rng);

struct SearchOptions {
  int n_starts = 64;
  std::uint64_t seed = 0;
  double tol_grad = 1e-10;
  int max_iter = 10000;
  double backtrack = 0.5;
  /// Tolerance for the rotating-criticality resampling test.
  double tol_rotating = 1e-8;
  int n_shifts = 8;
  bool compute_hessian = true;
  double h_fd = 1e-4;
};

struct DescentResult {
  ProductPoint point;
  bool converged = false;
  bool nonsmooth = false;
  int iterations = 0;
  double grad_norm = 0.0;
  /// Energy after every accepted step, starting with the initial value.
  std::vector<double> energies;
};

/// Riemannian gradient descent with Armijo backtracking, using exp as the
/// retraction. Trial steps that are nonsmooth or leave a chart are halved.
DescentResult gradient_descent(const ProductPoint& start, const SearchOptions& opts = {});
/// Levenberg-Marquardt on the gradient field; converges to critical points of
/// any index, including saddles that descent cannot reach.
DescentResult critical_point_newton(const ProductPoint& start, const SearchOptions& opts = {}, int max_iter = 200);

struct HessianIndex {
  int index = 0;
  int nullity = 0;
  bool ill_conditioned = false;
  double tau = 0.0;
  std::vector<double> eigenvalues;
};

/// Finite-difference Hessian of E composed with exp in an orthonormal tangent
/// frame; eigenvalues below -tau count toward the index, within tau toward the
/// nullity.
HessianIndex hessian_index(const ProductPoint& pt, double h_fd = 1e-4);

/// Closed curve through the tuple, joining neighbours by minimal segments.
ClosedCurve tuple_to_curve(const ProductPoint& pt);
/// Resamples (c(t), c(t + 2pi/k), ...) along the induced curve for n_shifts
/// values of t in [0, 2pi/k) and requires every sample to be critical.
/// Meshes have no log map; there a sample counts as critical when every
/// consecutive pair is still at distance L/k (up to the mesh tolerance).
bool is_rotating_critical(const ProductPoint& pt, int n_shifts = 8, double tol = 1e-8);

/// Same curve up to an orientation-preserving shift of the parameter.
bool same_curve(const ClosedCurve& a, const ClosedCurve& b, double tol = 1e-6);

struct CriticalPointRecord {
  ProductPoint point;
  double energy = 0.0;
  double grad_norm = 0.0;
  bool rotating = false;
  std::optional<ClosedCurve> curve;
  std::optional<HessianIndex> hessian;
  /// max_i |d_i - mean| / mean over the segment lengths d_i.
  double segment_residual = 0.0;
  /// Number of starts that reached this record.
  int multiplicity = 1;
};

struct SearchReport {
  int k = 0;
  int starts = 0;
  int converged = 0;
  int collapsed = 0;
  int rejected_nonsmooth = 0;
  int not_converged = 0;
  std::vector<CriticalPointRecord> records;
};

/// Multi-start search: every start runs gradient descent and a Newton phase;
/// nonzero critical points are deduplicated by their induced curves.
SearchReport find_critical_points(const SpaceHandle& space, int k, const SearchOptions& opts = {});

struct OpenIndexSearch {
  std::optional<int> value;
  /// The value follows from a closed-form argument rather than the search.
  bool exact = false;
  std::vector<SearchReport> reports;
};

/// Smallest k in [3, k_max] with a rotating nonzero critical point.
OpenIndexSearch open_index_search(const SpaceHandle& space, int k_max, const SearchOptions& opts = {});

}  // namespace lsl
