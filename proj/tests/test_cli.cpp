#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lsl/cli.hpp"
#include "lsl/io.hpp"
#include "lsl/spectra.hpp"

using namespace lsl;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "lsl_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

const char* kThetaJson = R"({"vertices": ["u", "v"],
  "edges": [{"a": "u", "b": "v", "len": 1.0}, {"a": "u", "b": "v", "len": 1.0}, {"a": "u", "b": "v", "len": 1.0}]})";

std::vector<double> lengths(const json& doc) { return doc["result"]["lengths"].get<std::vector<double>>(); }

}  // namespace

TEST(Scalar, Expressions) {
  EXPECT_DOUBLE_EQ(parse_scalar("pi"), kPi);
  EXPECT_DOUBLE_EQ(parse_scalar("pi/2"), kPi / 2);
  EXPECT_DOUBLE_EQ(parse_scalar("3*pi/4"), 3 * kPi / 4);
  EXPECT_DOUBLE_EQ(parse_scalar(" -1.5e-3 "), -1.5e-3);
  EXPECT_DOUBLE_EQ(parse_scalar("(1+pi)/2"), (1 + kPi) / 2);
  EXPECT_DOUBLE_EQ(parse_scalar("2*-pi"), -2 * kPi);
  for (const char* bad : {"", "pi/0", "abc", "1+", "(1", "1 2"}) EXPECT_THROW(parse_scalar(bad), Error) << bad;
}

TEST(SpaceSpec, AnalyticAndBuiltin) {
  EXPECT_DOUBLE_EQ(parse_space("circle:pi")->as<Circle>()->diameter(), kPi);
  const auto t = parse_space("torus:pi,pi/2");
  ASSERT_TRUE(t->as<FlatTorus>());
  EXPECT_EQ(t->as<FlatTorus>()->diameters(), (std::vector<double>{kPi, kPi / 2}));
  EXPECT_EQ(parse_space("sphere2")->as<RoundSphere>()->dimension(), 2);
  EXPECT_EQ(parse_space("sphere:3")->as<RoundSphere>()->dimension(), 3);
  EXPECT_DOUBLE_EQ(parse_space("interval")->as<MetricGraph>()->total_length(), 1.0);
  EXPECT_DOUBLE_EQ(parse_space("interval:2")->as<MetricGraph>()->total_length(), 2.0);
  EXPECT_EQ(parse_space("theta")->as<MetricGraph>()->edges().size(), 3u);
  for (const char* bad : {"circle", "torus:", "sphere:1.5", "blob", "circle:x"}) EXPECT_THROW(parse_space(bad), Error) << bad;
}

TEST(SpaceSpec, GraphJson) {
  const auto path = write("theta.json", kThetaJson);
  for (const std::string spec : {"graph:" + path, path}) {
    const auto g = parse_space(spec);
    ASSERT_TRUE(g->as<MetricGraph>());
    EXPECT_EQ(g->as<MetricGraph>()->num_vertices(), 2u);
    EXPECT_EQ(g->as<MetricGraph>()->first_betti(), 2u);
  }
  const auto h = graph_from_json_text(R"({"vertices": ["a", "b"], "edges": [{"a": "a", "b": "b", "len": "pi/2"}]})");
  EXPECT_DOUBLE_EQ(h->as<MetricGraph>()->total_length(), kPi / 2);
  EXPECT_THROW(graph_from_json_text(R"({"vertices": ["a"], "edges": [{"a": "a", "b": "z", "len": 1}]})"), Error);
  EXPECT_THROW(graph_from_json_text("{"), Error);
  EXPECT_THROW(parse_space("graph:/nonexistent/file.json"), Error);
}

TEST(SpaceSpec, MeshFiles) {
  const auto obj = write("tet.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 2 3 4\nf 3 1 4\n");
  const auto m = parse_space("mesh:" + obj);
  ASSERT_TRUE(m->as<MeshSurface>());
  EXPECT_EQ(m->as<MeshSurface>()->faces().size(), 4u);
  const MeshSurface& s = *m->as<MeshSurface>();
  EXPECT_NEAR(s.distance(s.vertex_point(0), s.vertex_point(1)), 1.0, 1e-12);

  const auto js = write("tet.json", R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]],
    "faces": [[0,2,1],[0,1,3],[1,2,3],[2,0,3]], "steiner": 2, "seed_cycles": [[0, 1, 2]]})");
  const auto n = parse_space("mesh:" + js);
  EXPECT_EQ(n->as<MeshSurface>()->steiner(), 2);
  EXPECT_EQ(n->as<MeshSurface>()->seed_cycles().size(), 1u);
  EXPECT_THROW(parse_space("mesh:" + write("bad.obj", "v 0 0 0\nf 1 2 3\n")), Error);
}

TEST(Cli, SpectrumTorus) {
  const auto r = run({"spectrum", "--space", "torus:pi,pi/2", "--k", "4", "--R", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<double> want;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) {
      const double l = std::hypot(kTwoPi * a, kTwoPi * b / 2);
      if (l > 0 && l <= 10) want.push_back(l);
    }
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end(), [](double x, double y) { return std::abs(x - y) < 1e-9; }), want.end());
  const auto got = lengths(r.doc());
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
}

TEST(Cli, SpectrumThetaAndCircle) {
  const auto path = write("theta_cli.json", kThetaJson);
  const auto r = run({"spectrum", "--space", path, "--k", "2", "--R", "4.5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(lengths(r.doc()), std::vector<double>{2.0});

  const auto c = run({"spectrum", "--space", "circle:pi", "--k", "3", "--R", "7"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  const auto l = lengths(c.doc());
  ASSERT_EQ(l.size(), 1u);
  EXPECT_NEAR(l[0], kTwoPi, 1e-12);
}

TEST(Cli, ArtifactEmbedsConfigAndVersion) {
  const auto r = run({"spectrum", "--space", "circle:pi", "--k", "3", "--R", "7"});
  const auto d = r.doc();
  EXPECT_EQ(d["version"], kVersion);
  EXPECT_EQ(d["command"], "spectrum");
  EXPECT_EQ(d["config"]["space"], "circle:pi");
  EXPECT_EQ(d["config"]["k"], 3);
  EXPECT_DOUBLE_EQ(d["config"]["R"].get<double>(), 7.0);
  EXPECT_TRUE(d["config"].contains("delta"));

  const auto e = run({"energy", "--space", "circle:pi", "--k", "2", "--starts", "4", "--seed", "11"});
  EXPECT_EQ(e.doc()["config"]["seed"], 11);

  const auto csv = run({"spectrum", "--space", "circle:pi", "--k", "3", "--R", "7", "--format", "csv"});
  ASSERT_EQ(csv.code, kExitOk);
  std::istringstream in(csv.out);
  std::string head, cols, row;
  std::getline(in, head);
  std::getline(in, cols);
  std::getline(in, row);
  ASSERT_EQ(head.rfind("# ", 0), 0u);
  EXPECT_EQ(json::parse(head.substr(2))["config"]["space"], "circle:pi");
  EXPECT_EQ(cols, "length,minind,opind,open,witnesses,status");
  EXPECT_EQ(std::stod(row.substr(0, row.find(','))), kTwoPi);
}

TEST(Cli, EnergyCircle) {
  const auto r = run({"energy", "--space", "circle:pi", "--k", "3", "--starts", "64", "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto recs = r.doc()["result"]["report"]["records"];
  ASSERT_FALSE(recs.empty());
  for (const auto& rec : recs) {
    EXPECT_TRUE(rec["rotating"].get<bool>());
    EXPECT_NEAR(rec["energy"].get<double>(), 4 * kPi * kPi, 1e-6);
    EXPECT_NEAR(rec["length"].get<double>(), kTwoPi, 1e-6);
  }
}

TEST(Cli, EnergyIntervalFindsNothing) {
  const auto r = run({"energy", "--space", "interval", "--kmax", "6", "--starts", "16"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto d = r.doc();
  EXPECT_TRUE(d["result"]["open_index"].is_null());
  for (const auto& rep : d["result"]["reports"]) EXPECT_TRUE(rep["records"].empty());
}

TEST(Cli, EnergySphereEquators) {
  const auto r = run({"energy", "--space", "sphere2", "--k", "4", "--starts", "64", "--seed", "7"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto recs = r.doc()["result"]["report"]["records"];
  bool equator = false;
  for (const auto& rec : recs) {
    if (rec["rotating"].get<bool>() && std::abs(rec["length"].get<double>() - kTwoPi) < 1e-6) equator = true;
  }
  EXPECT_TRUE(equator);
}

TEST(Cli, DeterministicAcrossRunsAndThreads) {
  const std::vector<std::string> base = {"energy", "--space", "torus:pi,pi/2", "--k", "3", "--starts", "16", "--seed", "5"};
  auto with = [&](const char* threads) {
    auto a = base;
    a.insert(a.begin(), {"--threads", threads});
    return run(a);
  };
  const auto a = with("1"), b = with("1"), c = with("4");
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, ConvergeFamilies) {
  const auto t = run({"converge", "--family", "torus-collapse", "--params", "2,4,8,16", "--k", "4", "--R", "10", "--eps", "1.0"});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  const auto m = t.doc()["result"]["members"];
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[3]["inclusion"], "holds");
  EXPECT_TRUE(t.doc()["result"]["non_increasing"].get<bool>());
  EXPECT_LT(m[3]["hausdorff"].get<double>(), m[0]["hausdorff"].get<double>());

  const auto plot = scratch("plot.csv").string();
  const auto c = run({"converge", "--family", "constant", "--params", "1,1,1", "--plot", plot});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  for (const auto& x : c.doc()["result"]["members"]) EXPECT_EQ(x["hausdorff"].get<double>(), 0.0);
  std::ifstream in(plot);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 + 3);
}

TEST(Cli, ConvergeEllipsoid) {
  const auto r = run({"converge", "--family", "ellipsoid-flatten", "--params", "1.0,0.5,0.25", "--k", "3", "--R", "13",
                      "--eps", "0.5", "--no-gh"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto m = r.doc()["result"]["members"];
  ASSERT_EQ(m.size(), 3u);
  EXPECT_TRUE(m[0]["seed_in_spectrum"].get<bool>());
  EXPECT_FALSE(m[2]["seed_in_spectrum"].get<bool>());
}

TEST(Cli, GapSystoleMinindGh) {
  const auto g = run({"gap", "--space", "sphere2", "--k", "4", "--a", "2*pi", "--b", "4*pi", "--eps", "0.1", "--R", "13"});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  EXPECT_EQ(g.doc()["result"]["verdict"], "gap");

  const auto s = run({"systole", "--space", "theta"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_DOUBLE_EQ(s.doc()["result"]["systole"].get<double>(), 2.0);

  const auto mi = run({"minind", "--space", "circle:pi"});
  ASSERT_EQ(mi.code, kExitOk) << mi.err;
  EXPECT_EQ(mi.doc()["result"]["minind"], 2);

  const auto gh = run({"gh", "--space", "circle:pi", "--target", "circle:pi", "--r", "pi/8"});
  ASSERT_EQ(gh.code, kExitOk) << gh.err;
  EXPECT_LE(gh.doc()["result"]["bound"].get<double>(), kPi / 4 + 1e-9);
}

TEST(Cli, ErrorsExitOne) {
  EXPECT_EQ(run({"converge", "--family", "nope", "--params", "1"}).code, kExitError);
  EXPECT_EQ(run({"spectrum", "--space", "blob", "--k", "2"}).code, kExitError);
  EXPECT_EQ(run({"spectrum", "--space", "circle:pi"}).code, kExitError);
  EXPECT_EQ(run({"systole", "--space", "circle:pi"}).code, kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run({}).code, kExitError);
  const auto tet = write("tet_energy.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 2 3 4\nf 3 1 4\n");
  const auto e = run({"energy", "--space", "mesh:" + tet, "--k", "3"});
  EXPECT_EQ(e.code, kExitError);
  EXPECT_NE(e.err.find("error"), std::string::npos);
}

TEST(Cli, UndecidedExitsTwo) {
  const auto box = box_mesh({1.0, 1.0, 0.05}, 4, 2);
  json j;
  for (const auto& v : box.vertices()) j["vertices"].push_back(v);
  for (const auto& f : box.faces()) j["faces"].push_back(f);
  j["steiner"] = box.steiner();
  j["seed_cycles"] = box.seed_cycles();
  const auto path = write("box.json", j.dump());
  const auto r = run({"spectrum", "--space", "mesh:" + path, "--k", "2", "--R", "9", "--delta", "2*pi", "--delta-floor",
                      "2*pi"});
  ASSERT_EQ(r.code, kExitUndecided) << r.err;
  EXPECT_FALSE(r.doc()["result"]["undecided"].empty());
  EXPECT_NE(r.err.find("undecided"), std::string::npos);
}
