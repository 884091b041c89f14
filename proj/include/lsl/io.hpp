#pragma once

#include <string>

#include "lsl/spaces.hpp"

namespace lsl {

/// Evaluates a scalar such as "pi/2", "3*pi/4", "-1.5e-3" or "(1+pi)/2".
/// Throws kParse on malformed input.
double parse_scalar(const std::string& text);

/// Space spec mini-language:
///   circle:<d>            Circle with diameter d
///   torus:<d1>,<d2>[,...] flat torus with the given factor diameters
///   sphere2 | sphere:<n>  unit round sphere
///   graph:<path>          metric graph JSON
///   mesh:<path>           triangle mesh (.obj or JSON)
///   interval[:<len>]      segment of the given length (default 1)
///   theta | doubled-square
/// A bare path ending in .json is read as a graph.
SpaceHandle parse_space(const std::string& spec);

/// {"vertices": ["v1", ...], "edges": [{"a": "v1", "b": "v2", "len": 1.0}, ...]}
/// Edge lengths may be numbers or scalar strings.
SpaceHandle read_graph_json(const std::string& path);
SpaceHandle graph_from_json_text(const std::string& text, const std::string& label = "graph");

/// Wavefront OBJ (v / f lines, polygons fanned) or JSON
/// {"vertices": [[x, y, z], ...], "faces": [[i, j, k], ...], "steiner": 4,
///  "seed_cycles": [[v0, v1, ...], ...]}; steiner and seed_cycles are optional.
SpaceHandle read_mesh(const std::string& path, int steiner = 4);

}  // namespace lsl
