#include "lsl/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lsl {
namespace {

using nlohmann::json;

class ScalarParser {
 public:
  explicit ScalarParser(const std::string& s) : s_(s) {}

  double run() {
    const double v = sum();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return v;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::kParse, "bad scalar '" + s_ + "': " + why);
  }

  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        const double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.compare(i_, 2, "pi") == 0) {
      i_ += 2;
      return kPi;
    }
    double v = 0.0;
    const char* b = s_.data() + i_;
    const auto [end, ec] = std::from_chars(b, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == b) fail("expected a number");
    i_ += static_cast<std::size_t>(end - b);
    return v;
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

double json_scalar(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_scalar(v.get<std::string>());
  throw Error(ErrorKind::kParse, "expected a number");
}

MeshSurface mesh_from_obj(const std::string& text, int steiner) {
  std::vector<Vec3> verts;
  std::vector<std::array<std::size_t, 3>> faces;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p{};
      if (!(ls >> p[0] >> p[1] >> p[2])) throw Error(ErrorKind::kParse, "bad vertex line: " + line);
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<std::size_t> idx;
      std::string tok;
      while (ls >> tok) {
        // v, v/vt, v//vn, v/vt/vn
        const long i = std::stol(tok.substr(0, tok.find('/')));
        const long n = static_cast<long>(verts.size());
        const long k = i < 0 ? n + i : i - 1;
        if (k < 0 || k >= n) throw Error(ErrorKind::kParse, "face index out of range: " + line);
        idx.push_back(static_cast<std::size_t>(k));
      }
      if (idx.size() < 3) throw Error(ErrorKind::kParse, "degenerate face: " + line);
      for (std::size_t j = 1; j + 1 < idx.size(); ++j) faces.push_back({idx[0], idx[j], idx[j + 1]});
    }
  }
  return MeshSurface(std::move(verts), std::move(faces), steiner);
}

MeshSurface mesh_from_json(const std::string& text, int steiner) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
  std::vector<Vec3> verts;
  std::vector<std::array<std::size_t, 3>> faces;
  std::vector<std::vector<std::size_t>> cycles;
  try {
    for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()});
    for (const auto& f : j.at("faces")) faces.push_back({f.at(0).get<std::size_t>(), f.at(1).get<std::size_t>(), f.at(2).get<std::size_t>()});
    if (j.contains("steiner")) steiner = j["steiner"].get<int>();
    if (j.contains("seed_cycles")) cycles = j["seed_cycles"].get<std::vector<std::vector<std::size_t>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
  for (const auto& f : faces)
    for (std::size_t v : f)
      if (v >= verts.size()) throw Error(ErrorKind::kParse, "face index out of range");
  for (const auto& c : cycles)
    for (std::size_t v : c)
      if (v >= verts.size()) throw Error(ErrorKind::kParse, "seed cycle index out of range");
  MeshSurface mesh(std::move(verts), std::move(faces), steiner);
  mesh.set_seed_cycles(std::move(cycles));
  return mesh;
}

}  // namespace

double parse_scalar(const std::string& text) { return ScalarParser(text).run(); }

SpaceHandle graph_from_json_text(const std::string& text, const std::string& label) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
  std::vector<std::string> names;
  std::vector<GraphEdge> edges;
  try {
    for (const auto& v : j.at("vertices")) names.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    auto index = [&](const json& v) -> std::size_t {
      const std::string n = v.is_string() ? v.get<std::string>() : v.dump();
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return i;
      throw Error(ErrorKind::kParse, "unknown vertex " + n);
    };
    for (const auto& e : j.at("edges")) edges.push_back({index(e.at("a")), index(e.at("b")), json_scalar(e.at("len"))});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
  return make_graph(std::move(names), std::move(edges), label);
}

SpaceHandle read_graph_json(const std::string& path) { return graph_from_json_text(read_file(path), path); }

SpaceHandle read_mesh(const std::string& path, int steiner) {
  const std::string text = read_file(path);
  auto mesh = ends_with(path, ".obj") ? mesh_from_obj(text, steiner) : mesh_from_json(text, steiner);
  return make_mesh(std::move(mesh), path);
}

SpaceHandle parse_space(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  const bool has_arg = colon != std::string::npos;

  if (head == "circle") {
    if (!has_arg) throw Error(ErrorKind::kParse, "circle needs a diameter");
    return make_circle(parse_scalar(arg));
  }
  if (head == "torus") {
    if (!has_arg) throw Error(ErrorKind::kParse, "torus needs diameters");
    std::vector<double> d;
    for (const auto& s : split(arg, ',')) d.push_back(parse_scalar(s));
    return make_torus(std::move(d));
  }
  if (head == "sphere2" && !has_arg) return make_sphere(2);
  if (head == "sphere") {
    if (!has_arg) throw Error(ErrorKind::kParse, "sphere needs a dimension");
    const double n = parse_scalar(arg);
    if (n != static_cast<int>(n) || n < 1) throw Error(ErrorKind::kParse, "sphere dimension must be a positive integer");
    return make_sphere(static_cast<int>(n));
  }
  if (head == "graph") return read_graph_json(arg);
  if (head == "mesh") return read_mesh(arg);
  if (head == "interval") return make_interval(has_arg ? parse_scalar(arg) : 1.0);
  if (head == "theta" && !has_arg) return make_theta_graph();
  if (head == "doubled-square" && !has_arg) return make_doubled_square_graph();
  if (!has_arg && ends_with(spec, ".json")) return read_graph_json(spec);
  throw Error(ErrorKind::kParse, "unknown space spec '" + spec + "'");
}

}  // namespace lsl
