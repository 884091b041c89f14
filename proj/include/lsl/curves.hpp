#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "lsl/spaces.hpp"

namespace lsl {

// ---------------------------------------------------------------------------
// Runs: minimal segments a closed curve is made of
// ---------------------------------------------------------------------------

/// Arc of a circle from `start` with signed displacement `delta`.
struct CircleRun {
  double start = 0.0;
  double delta = 0.0;
};

/// Straight segment on a flat torus.
struct TorusRun {
  std::vector<double> start;
  std::vector<double> delta;
};

/// Great-circle arc from `start` in the unit direction `dir`.
struct SphereRun {
  std::vector<double> start;
  std::vector<double> dir;
  double angle = 0.0;
};

/// Piece of a single edge, between two offsets.
struct GraphRun {
  std::size_t edge = 0;
  double from = 0.0;
  double to = 0.0;
};

/// Straight segment inside one mesh face.
struct MeshRun {
  std::size_t face = 0;
  std::array<double, 3> from{};
  std::array<double, 3> to{};
  double length = 0.0;
};

using Run = std::variant<CircleRun, TorusRun, SphereRun, GraphRun, MeshRun>;

double run_length(const Run& run);

// ---------------------------------------------------------------------------
// ClosedCurve
// ---------------------------------------------------------------------------

/// Constant-speed closed curve: a cyclic chain of minimal runs. The parameter
/// t in [0, 2pi) maps to arclength tL/(2pi).
class ClosedCurve {
 public:
  /// Throws kInvalidArgument unless the runs are positive, chain up cyclically,
  /// and (on exact spaces) each run is a minimal segment.
  ClosedCurve(SpaceHandle space, std::vector<Run> runs);

  const SpaceHandle& space() const { return space_; }
  const std::vector<Run>& runs() const { return runs_; }
  std::size_t num_runs() const { return runs_.size(); }
  double length() const { return length_; }
  /// Arclength at which run i starts.
  double run_start(std::size_t i) const { return prefix_[i]; }
  double min_run_length() const;

  SpacePoint at_arclength(double s) const;
  SpacePoint eval(double t) const { return at_arclength(t / kTwoPi * length_); }
  /// Index of the run containing arclength s (reduced mod L).
  std::size_t run_at(double s) const;
  std::vector<SpacePoint> breakpoints() const;
  /// d(at_arclength(s), at_arclength(s + w)). Mesh curves keep the distance
  /// field of every source arclength they are queried at.
  double window_distance(double s, double w) const;

 private:
  struct FieldCache;

  SpaceHandle space_;
  std::vector<Run> runs_;
  std::vector<double> prefix_;
  double length_ = 0.0;
  std::shared_ptr<FieldCache> cache_;
};

struct DirectedEdge {
  std::size_t edge = 0;
  /// +1 traverses from the edge's first endpoint to its second.
  int dir = +1;
};

/// The circle traversed `winding` times (sign gives orientation).
ClosedCurve circle_loop(const SpaceHandle& space, int winding, double start = 0.0);
/// The closed straight line with lattice displacement (n_i * circumference_i).
ClosedCurve torus_geodesic(const SpaceHandle& space, const std::vector<long>& lattice,
                           std::optional<TorusPoint> start = std::nullopt);
/// Great circle through `start` with initial unit direction `dir`, `turns` times.
ClosedCurve great_circle(const SpaceHandle& space, const SpherePoint& start, const Tangent& dir,
                         int turns = 1);
/// Closed edge walk; consecutive edges must share the traversal vertex.
ClosedCurve graph_walk(const SpaceHandle& space, const std::vector<DirectedEdge>& walk);
/// Closed polygon along mesh edges through the given vertex cycle.
ClosedCurve mesh_vertex_cycle(const SpaceHandle& space, const std::vector<std::size_t>& cycle);
/// Closed curve joining consecutive breakpoints by minimal segments.
/// On circles, tori, and spheres a segment whose minimizer is not unique needs
/// a witness (its initial velocity); without one kAmbiguousDirection is thrown.
/// Metric graphs throw kAmbiguousDirection on tied shortest routes. Meshes use
/// the refined-graph shortest path.
ClosedCurve curve_from_breakpoints(const SpaceHandle& space, const std::vector<SpacePoint>& points,
                                   const std::vector<std::optional<Tangent>>& witnesses = {});
/// The curve traversed n times.
ClosedCurve iterate(const ClosedCurve& curve, int n);

// ---------------------------------------------------------------------------
// Minimizing checks
// ---------------------------------------------------------------------------

enum class Verdict { kHolds, kViolated, kInconclusive };

const char* to_string(Verdict v);

struct CheckOptions {
  /// Parameter grid step for spaces without an exact check.
  double delta = kTwoPi / 1024;
  /// Smallest step tried before an inconclusive verdict is returned.
  double delta_floor = kTwoPi / 65536;
};

struct WindowCheck {
  Verdict verdict = Verdict::kHolds;
  /// w - min_t d(eval(t), eval(t + window)); positive means a deficit.
  double margin = 0.0;
  /// Parameter at which the minimum was found.
  double t_star = 0.0;
  /// Certification slack of the final grid (0 for exact checks).
  double tol_cert = 0.0;
  double delta_used = 0.0;
};

/// Whether the curve minimizes on every subarc of arclength w.
/// Metric graphs are checked exactly on the linear pieces of
/// g(s) = d(c(s), c(s + w)); other spaces use a refined grid.
WindowCheck check_window(const ClosedCurve& curve, double w, const CheckOptions& opts = {});
WindowCheck check_one_over_k(const ClosedCurve& curve, int k, const CheckOptions& opts = {});

struct IndexResult {
  /// Smallest qualifying k, or empty when none up to k_max does.
  std::optional<int> value;
  /// Some smaller k could not be decided at the grid floor.
  bool undecided = false;
};

IndexResult minimizing_index(const ClosedCurve& curve, int k_max = 16, const CheckOptions& opts = {});

struct InjradResult {
  double value = 0.0;
  /// Certified slack of the underlying checks.
  double error = 0.0;
};

/// Largest h such that the curve minimizes on every subarc of length h.
InjradResult curve_injrad(const ClosedCurve& curve, const CheckOptions& opts = {});

bool is_openly(const ClosedCurve& curve, int k, const CheckOptions& opts = {});
/// Smallest k for which the curve is an openly 1/k geodesic.
IndexResult open_index(const ClosedCurve& curve, int k_max = 16, const CheckOptions& opts = {});
bool is_closed_geodesic(const ClosedCurve& curve, const CheckOptions& opts = {});

struct CurveReport {
  double length = 0.0;
  bool is_geodesic = false;
  IndexResult minind;
  IndexResult opind;
  InjradResult injrad;
  /// (k, margin) for every k in [2, k_max].
  std::vector<std::pair<int, double>> margins;
};

CurveReport analyze_curve(const ClosedCurve& curve, int k_max = 16, const CheckOptions& opts = {});

}  // namespace lsl
