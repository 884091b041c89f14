#pragma once

#include <optional>
#include <vector>

#include "lsl/curves.hpp"

namespace lsl {

struct SpectrumEntry {
  double length = 0.0;
  /// Smallest minimizing / open index among the witnesses.
  std::optional<int> minind;
  std::optional<int> opind;
  /// Some witness is an openly 1/k geodesic (k-spectra only).
  bool open = false;
  std::vector<ClosedCurve> witnesses;
};

struct Spectrum {
  SpaceHandle space;
  /// Empty for the full length spectrum.
  std::optional<int> k;
  bool open_only = false;
  double R = 0.0;
  std::vector<SpectrumEntry> entries;
  /// Candidates whose 1/k check stayed inconclusive at the grid floor.
  std::vector<SpectrumEntry> undecided;
  /// False when the candidate geodesics came from a heuristic search.
  bool complete = true;

  std::vector<double> lengths() const;
};

struct GeodesicEnumeration {
  SpaceHandle space;
  double R = 0.0;
  /// Canonical walks, sorted by length then lexicographically.
  std::vector<std::vector<DirectedEdge>> walks;
  std::vector<ClosedCurve> curves;
  bool complete = true;
};

inline constexpr std::size_t kDefaultWalkCap = 1000000;

/// Canonical form of a closed walk: lexicographically smallest rotation over
/// both orientations, comparing directed edges as (edge, direction).
std::vector<DirectedEdge> canonical_walk(const std::vector<DirectedEdge>& walk);

/// Every closed non-backtracking edge walk of length <= R, up to rotation and
/// reversal. Throws kCombinatorialBlowup once more than `cap` partial walks
/// have been explored.
GeodesicEnumeration enumerate_graph_geodesics(const SpaceHandle& graph, double R,
                                              std::size_t cap = kDefaultWalkCap);

/// Lengths of closed geodesics in (0, R].
Spectrum spectrum(const SpaceHandle& space, double R, const CheckOptions& opts = {});
/// Lengths of 1/k geodesics in (0, R]; R defaults to k * diameter.
Spectrum spectrum_1_over_k(const SpaceHandle& space, int k, std::optional<double> R = std::nullopt,
                           const CheckOptions& opts = {});
/// Lengths of openly 1/k geodesics in (0, R]; empty for k = 2.
Spectrum spectrum_open_1_over_k(const SpaceHandle& space, int k, std::optional<double> R = std::nullopt,
                                const CheckOptions& opts = {});

struct Systole {
  double length = 0.0;
  ClosedCurve witness;
};

/// Shortest closed geodesic of a metric graph. Throws kSystoleUndefined on trees.
Systole systole(const SpaceHandle& graph);

/// sup{t : every geodesic segment of length t is minimal}; closed forms on
/// analytic spaces, half the systole on graphs (infinite on trees).
std::optional<double> space_injrad(const LengthSpace& space);

struct SpaceIndex {
  std::optional<int> value;
  /// The search was heuristic, so `value` is only an upper bound.
  bool heuristic = false;
  std::optional<ClosedCurve> witness;
};

SpaceIndex space_minind(const SpaceHandle& space, int k_max = 16, const CheckOptions& opts = {});

struct LengthBounds {
  int k = 0;
  /// Shortest closed geodesic found.
  double upper = 0.0;
  /// min{k injrad, min L_{1/k}}; absent when injrad is not available.
  std::optional<double> lower;
  double diameter = 0.0;
  bool heuristic = false;
};

/// Throws kInvalidArgument when the space has no 1/k geodesic with k <= k_max.
LengthBounds min_length_bounds(const SpaceHandle& space, int k_max = 16, const CheckOptions& opts = {});

/// Grid options suited to mesh curves, whose distance queries are expensive.
CheckOptions mesh_check_options();

}  // namespace lsl
