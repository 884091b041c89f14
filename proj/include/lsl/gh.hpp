#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lsl/spectra.hpp"

namespace lsl {

/// Hausdorff distance between finite subsets of the real line.
/// Throws kEmptyInput when either set is empty.
double hausdorff_distance_reals(const std::vector<double>& a, const std::vector<double>& b);

using DistanceMatrix = std::vector<std::vector<double>>;

DistanceMatrix distance_matrix(const NetSample& net);

/// A relation between two finite metric samples.
struct Correspondence {
  DistanceMatrix dx;
  DistanceMatrix dy;
  std::vector<std::pair<std::size_t, std::size_t>> relation;
  double distortion = 0.0;
};

/// max |dx(x, x') - dy(y, y')| over pairs of related pairs. Throws kNonCovering
/// unless every point of both samples is related.
double correspondence_distortion(const DistanceMatrix& dx, const DistanceMatrix& dy,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& relation);
Correspondence make_correspondence(DistanceMatrix dx, DistanceMatrix dy,
                                   std::vector<std::pair<std::size_t, std::size_t>> relation);

enum class MatchMethod { kExactBijection, kGreedy, kProvidedMap };

const char* to_string(MatchMethod m);

/// Largest net size accepted by the exact bijection search.
inline constexpr std::size_t kMaxExactNet = 8;

using PointMap = std::function<SpacePoint(const SpacePoint&)>;

struct GhBound {
  MatchMethod method = MatchMethod::kGreedy;
  double r = 0.0;
  NetSample net_x;
  NetSample net_y;
  Correspondence correspondence;
  /// 2 max(r, achieved covering radii) + distortion.
  double bound = 0.0;
  /// r_x + r_y + distortion / 2 (informational).
  double sharp_bound = 0.0;
};

struct GhOptions {
  MatchMethod method = MatchMethod::kGreedy;
  /// Probe density for the nets; defaults to r / 4.
  std::optional<double> density;
  /// Required for kProvidedMap: the net on Y is the image of the net on X.
  PointMap map;
};

/// Certified upper bound on d_GH(X, Y) from r-nets and a correspondence.
/// kExactBijection throws kNetTooLarge on nets above kMaxExactNet points or of
/// different sizes.
GhBound gh_upper_bound(const SpaceHandle& x, const SpaceHandle& y, double r, const GhOptions& opts = {});

/// Distortion of the vertex-index bijection between two meshes with the same
/// combinatorics.
double mesh_vertex_distortion(const MeshSurface& a, const MeshSurface& b);

// ---------------------------------------------------------------------------
// Convergence and gaps
// ---------------------------------------------------------------------------

struct SpaceFamily {
  std::string label;
  std::function<SpaceHandle(double)> member;
  SpaceHandle limit;
  /// Distance bound between a member and the limit, when the family has one.
  std::function<std::optional<double>(double)> gh_bound;
};

/// FlatTorus(pi, pi/j) collapsing to Circle(pi).
SpaceFamily torus_collapse_family(double gh_r = kPi / 32);
/// Every member equals `space`.
SpaceFamily constant_family(SpaceHandle space);
/// Ellipsoid meshes x^2 + y^2 + (z/c)^2 = 1 flattening to the doubled disk.
SpaceFamily ellipsoid_flatten_family(int ring = 16, int bands = 8, int steiner = 2);

enum class Inclusion { kHolds, kFails, kInconclusive };

const char* to_string(Inclusion v);

struct ConvergenceMember {
  double param = 0.0;
  Spectrum spectrum;
  std::optional<double> gh_bound;
  /// Hausdorff distance from spectrum u {0} to limit spectrum u {0}.
  double hausdorff = 0.0;
  Inclusion inclusion = Inclusion::kHolds;
  /// Member lengths farther than eps from limit u {0}.
  std::vector<double> outside;
  /// Minimizing index of the first seed cycle (meshes only).
  std::optional<int> seed_minind;
  bool seed_in_spectrum = false;
};

struct ConvergenceReport {
  std::string label;
  int k = 0;
  double R = 0.0;
  double eps = 0.0;
  std::vector<double> limit_lengths;
  std::vector<ConvergenceMember> members;
  bool strictly_decreasing = false;
  bool non_increasing = false;
};

/// Members run in parallel; `with_gh` adds the family's distance bound per member.
ConvergenceReport convergence_experiment(const SpaceFamily& family, const std::vector<double>& params, int k,
                                         double R, double eps, bool with_gh = true, int seed_k_max = 16);

enum class GapVerdict { kGap, kOccupied, kInconclusive };

const char* to_string(GapVerdict v);

struct GapResult {
  GapVerdict verdict = GapVerdict::kGap;
  /// Entries inside [a + eps, b - eps].
  std::vector<SpectrumEntry> occupied;
  /// Undecided entries inside the interval.
  std::vector<SpectrumEntry> undecided;
};

/// Whether no spectrum entry lies in [a + eps, b - eps].
GapResult gap_check(const Spectrum& spectrum, double a, double b, double eps);

}  // namespace lsl
