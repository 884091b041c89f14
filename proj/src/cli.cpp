#include "lsl/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsl/energy.hpp"
#include "lsl/gh.hpp"
#include "lsl/io.hpp"
#include "lsl/parallel.hpp"

namespace lsl {
namespace {

using nlohmann::json;

struct Options {
  std::string space;
  std::string target;
  std::string family;
  std::string params;
  std::string R;
  std::string eps;
  std::string r;
  std::string a;
  std::string b;
  std::string delta;
  std::string delta_floor;
  std::string density;
  std::string out;
  std::string plot;
  std::string format = "json";
  std::string method = "greedy";
  int k = 0;
  int kmax = 16;
  int starts = 64;
  std::uint64_t seed = 0;
  int threads = 0;
  bool open = false;
  bool no_hessian = false;
  bool no_gh = false;
};

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string num(double v) { return json(v).dump(); }

template <class T>
std::string num(const std::optional<T>& v) {
  return v ? json(*v).dump() : std::string();
}

json point_json(const SpacePoint& p) {
  return std::visit(
      [](const auto& q) -> json {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, FinitePoint>) {
          return {{"index", q.index}};
        } else if constexpr (std::is_same_v<T, GraphPoint>) {
          if (q.is_vertex()) return {{"vertex", q.vertex}};
          return {{"edge", q.edge}, {"offset", q.offset}};
        } else if constexpr (std::is_same_v<T, CirclePoint>) {
          return {{"s", q.s}};
        } else if constexpr (std::is_same_v<T, TorusPoint>) {
          return {{"s", q.s}};
        } else if constexpr (std::is_same_v<T, SpherePoint>) {
          return {{"x", q.x}};
        } else {
          return {{"face", q.face}, {"bary", q.bary}};
        }
      },
      p);
}

json curve_json(const ClosedCurve& c) {
  json bp = json::array();
  for (const auto& p : c.breakpoints()) bp.push_back(point_json(p));
  return {{"length", c.length()}, {"breakpoints", std::move(bp)}};
}

json entry_json(const SpectrumEntry& e) {
  json j = {{"length", e.length},
            {"minind", opt(e.minind)},
            {"opind", opt(e.opind)},
            {"open", e.open},
            {"witnesses", e.witnesses.size()}};
  if (!e.witnesses.empty()) j["witness"] = curve_json(e.witnesses.front());
  return j;
}

CheckOptions check_options(const Options& o, const LengthSpace& space, json& config) {
  CheckOptions c = space.as<MeshSurface>() ? mesh_check_options() : CheckOptions{};
  if (!o.delta.empty()) c.delta = parse_scalar(o.delta);
  if (!o.delta_floor.empty()) c.delta_floor = parse_scalar(o.delta_floor);
  if (!(c.delta > 0.0) || !(c.delta_floor > 0.0) || c.delta_floor > c.delta)
    throw Error(ErrorKind::kInvalidArgument, "need 0 < delta-floor <= delta");
  config["delta"] = c.delta;
  config["delta_floor"] = c.delta_floor;
  return c;
}

double positive(const std::string& text, const char* name) {
  const double v = parse_scalar(text);
  if (!(v > 0.0)) throw Error(ErrorKind::kInvalidArgument, std::string(name) + " must be positive");
  return v;
}

std::vector<double> scalar_list(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) out.push_back(parse_scalar(cur));
  if (out.empty()) throw Error(ErrorKind::kInvalidArgument, "empty parameter list");
  return out;
}

struct Artifact {
  json result;
  /// Header and rows for CSV output.
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int status = kExitOk;
};

std::string render(const std::string& command, const json& config, const Artifact& a, const std::string& format) {
  const json head = {{"tool", "lsl"}, {"version", kVersion}, {"command", command}, {"config", config}};
  if (format == "csv") {
    std::ostringstream s;
    s << "# " << head.dump() << "\n";
    for (std::size_t i = 0; i < a.columns.size(); ++i) s << (i ? "," : "") << a.columns[i];
    s << "\n";
    for (const auto& row : a.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i];
      s << "\n";
    }
    return s.str();
  }
  json doc = head;
  doc["result"] = a.result;
  return doc.dump(2) + "\n";
}

std::string csv_table(const std::string& command, const json& config, const Artifact& a) {
  return render(command, config, a, "csv");
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  f << text;
}

void spectrum_rows(const Spectrum& s, Artifact& a) {
  a.columns = {"length", "minind", "opind", "open", "witnesses", "status"};
  auto add = [&](const SpectrumEntry& e, const char* status) {
    a.rows.push_back({num(e.length), num(e.minind), num(e.opind), e.open ? "1" : "0",
                      std::to_string(e.witnesses.size()), status});
  };
  for (const auto& e : s.entries) add(e, "decided");
  for (const auto& e : s.undecided) add(e, "undecided");
}

Artifact cmd_spectrum(const Options& o, json& config, std::ostream& err) {
  config["space"] = o.space;
  const auto space = parse_space(o.space);
  const auto copts = check_options(o, *space, config);
  std::optional<double> R;
  if (!o.R.empty()) R = positive(o.R, "R");
  Spectrum s;
  if (o.k) {
    if (o.k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
    config["k"] = o.k;
    config["open"] = o.open;
    s = o.open ? spectrum_open_1_over_k(space, o.k, R, copts) : spectrum_1_over_k(space, o.k, R, copts);
  } else {
    if (o.open) throw Error(ErrorKind::kInvalidArgument, "--open needs --k");
    if (!R) throw Error(ErrorKind::kInvalidArgument, "the full spectrum needs --R");
    config["k"] = nullptr;
    s = spectrum(space, *R, copts);
  }
  config["R"] = s.R;

  Artifact a;
  json entries = json::array(), undecided = json::array();
  for (const auto& e : s.entries) entries.push_back(entry_json(e));
  for (const auto& e : s.undecided) undecided.push_back(entry_json(e));
  a.result = {{"lengths", s.lengths()}, {"complete", s.complete}, {"entries", entries}, {"undecided", undecided}};
  spectrum_rows(s, a);
  if (!s.undecided.empty()) {
    a.status = kExitUndecided;
    err << "undecided lengths:";
    for (const auto& e : s.undecided) err << " " << num(e.length);
    err << "\n";
  }
  return a;
}

Artifact cmd_minind(const Options& o, json& config) {
  config["space"] = o.space;
  config["kmax"] = o.kmax;
  const auto space = parse_space(o.space);
  const auto copts = check_options(o, *space, config);
  const auto si = space_minind(space, o.kmax, copts);
  const auto inj = space_injrad(*space);
  Artifact a;
  a.result = {{"minind", opt(si.value)}, {"heuristic", si.heuristic}, {"injrad", opt(inj)}};
  a.result["witness"] = si.witness ? curve_json(*si.witness) : json(nullptr);
  a.columns = {"minind", "heuristic", "injrad", "witness_length"};
  a.rows.push_back({num(si.value), si.heuristic ? "1" : "0", num(inj),
                    si.witness ? num(si.witness->length()) : std::string()});
  return a;
}

Artifact cmd_systole(const Options& o, json& config) {
  config["space"] = o.space;
  const auto s = systole(parse_space(o.space));
  Artifact a;
  a.result = {{"systole", s.length}, {"witness", curve_json(s.witness)}};
  a.columns = {"systole", "runs"};
  a.rows.push_back({num(s.length), std::to_string(s.witness.num_runs())});
  return a;
}

json report_json(const SearchReport& r) {
  json recs = json::array();
  for (const auto& c : r.records) {
    json j = {{"energy", c.energy},
              {"grad_norm", c.grad_norm},
              {"rotating", c.rotating},
              {"segment_residual", c.segment_residual},
              {"multiplicity", c.multiplicity}};
    json pts = json::array();
    for (const auto& p : c.point.points) pts.push_back(point_json(p));
    j["points"] = std::move(pts);
    j["length"] = c.curve ? json(c.curve->length()) : json(nullptr);
    if (c.hessian) {
      j["hessian"] = {{"index", c.hessian->index},
                      {"nullity", c.hessian->nullity},
                      {"ill_conditioned", c.hessian->ill_conditioned},
                      {"tau", c.hessian->tau},
                      {"eigenvalues", c.hessian->eigenvalues}};
    } else {
      j["hessian"] = nullptr;
    }
    recs.push_back(std::move(j));
  }
  return {{"k", r.k},
          {"starts", r.starts},
          {"converged", r.converged},
          {"collapsed", r.collapsed},
          {"rejected_nonsmooth", r.rejected_nonsmooth},
          {"not_converged", r.not_converged},
          {"records", std::move(recs)}};
}

void report_rows(const SearchReport& r, Artifact& a) {
  for (const auto& c : r.records) {
    a.rows.push_back({std::to_string(r.k), num(c.energy), c.curve ? num(c.curve->length()) : std::string(),
                      num(c.grad_norm), c.rotating ? "1" : "0",
                      c.hessian ? std::to_string(c.hessian->index) : std::string(),
                      c.hessian ? std::to_string(c.hessian->nullity) : std::string(),
                      std::to_string(c.multiplicity)});
  }
}

Artifact cmd_energy(const Options& o, json& config) {
  config["space"] = o.space;
  const auto space = parse_space(o.space);
  SearchOptions so;
  if (o.starts < 1) throw Error(ErrorKind::kInvalidArgument, "starts must be positive");
  so.n_starts = o.starts;
  so.seed = o.seed;
  so.compute_hessian = !o.no_hessian;
  config["starts"] = so.n_starts;
  config["seed"] = so.seed;
  config["hessian"] = so.compute_hessian;
  config["tol_grad"] = so.tol_grad;
  config["max_iter"] = so.max_iter;

  Artifact a;
  a.columns = {"k", "energy", "length", "grad_norm", "rotating", "index", "nullity", "multiplicity"};
  if (o.k) {
    if (o.k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
    config["k"] = o.k;
    const auto r = find_critical_points(space, o.k, so);
    a.result = {{"report", report_json(r)}};
    report_rows(r, a);
  } else {
    if (o.kmax < 3) throw Error(ErrorKind::kInvalidArgument, "kmax must be at least 3");
    config["k"] = nullptr;
    config["kmax"] = o.kmax;
    const auto s = open_index_search(space, o.kmax, so);
    json reps = json::array();
    for (const auto& r : s.reports) {
      reps.push_back(report_json(r));
      report_rows(r, a);
    }
    a.result = {{"open_index", opt(s.value)}, {"exact", s.exact}, {"reports", std::move(reps)}};
  }
  return a;
}

Artifact cmd_gh(const Options& o, json& config) {
  config["space"] = o.space;
  config["target"] = o.target;
  const auto x = parse_space(o.space);
  const auto y = parse_space(o.target);
  const double r = positive(o.r, "r");
  GhOptions go;
  if (o.method == "greedy") go.method = MatchMethod::kGreedy;
  else if (o.method == "exact") go.method = MatchMethod::kExactBijection;
  else throw Error(ErrorKind::kInvalidArgument, "unknown method '" + o.method + "'");
  if (!o.density.empty()) go.density = positive(o.density, "density");
  config["r"] = r;
  config["method"] = o.method;
  config["density"] = go.density ? json(*go.density) : json(r / 4);
  const auto b = gh_upper_bound(x, y, r, go);
  Artifact a;
  a.result = {{"bound", b.bound},
              {"sharp_bound", b.sharp_bound},
              {"distortion", b.correspondence.distortion},
              {"net_x", {{"size", b.net_x.points.size()}, {"achieved", b.net_x.achieved}}},
              {"net_y", {{"size", b.net_y.points.size()}, {"achieved", b.net_y.achieved}}}};
  a.columns = {"method", "r", "net_x", "net_y", "distortion", "bound", "sharp_bound"};
  a.rows.push_back({o.method, num(r), std::to_string(b.net_x.points.size()), std::to_string(b.net_y.points.size()),
                    num(b.correspondence.distortion), num(b.bound), num(b.sharp_bound)});
  return a;
}

Artifact cmd_converge(const Options& o, json& config, const std::string& space_default) {
  SpaceFamily fam;
  config["family"] = o.family;
  if (o.family == "torus-collapse") {
    fam = torus_collapse_family();
  } else if (o.family == "ellipsoid-flatten") {
    fam = ellipsoid_flatten_family();
  } else if (o.family == "constant") {
    const std::string spec = o.space.empty() ? space_default : o.space;
    config["space"] = spec;
    fam = constant_family(parse_space(spec));
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown family '" + o.family + "'");
  }
  const auto params = scalar_list(o.params);
  const int k = o.k ? o.k : 4;
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be at least 2");
  const double R = o.R.empty() ? 10.0 : positive(o.R, "R");
  const double eps = o.eps.empty() ? 1.0 : parse_scalar(o.eps);
  if (eps < 0.0) throw Error(ErrorKind::kInvalidArgument, "eps must be nonnegative");
  config["params"] = params;
  config["k"] = k;
  config["R"] = R;
  config["eps"] = eps;
  config["gh"] = !o.no_gh;

  const auto rep = convergence_experiment(fam, params, k, R, eps, !o.no_gh);
  Artifact a;
  json members = json::array();
  a.columns = {"param", "hausdorff", "gh_bound", "inclusion", "outside", "entries", "seed_minind", "seed_in_spectrum"};
  for (const auto& m : rep.members) {
    members.push_back({{"param", m.param},
                       {"lengths", m.spectrum.lengths()},
                       {"complete", m.spectrum.complete},
                       {"hausdorff", m.hausdorff},
                       {"gh_bound", opt(m.gh_bound)},
                       {"inclusion", to_string(m.inclusion)},
                       {"outside", m.outside},
                       {"seed_minind", opt(m.seed_minind)},
                       {"seed_in_spectrum", m.seed_in_spectrum}});
    a.rows.push_back({num(m.param), num(m.hausdorff), num(m.gh_bound), to_string(m.inclusion),
                      std::to_string(m.outside.size()), std::to_string(m.spectrum.entries.size()),
                      num(m.seed_minind), m.seed_in_spectrum ? "1" : "0"});
    if (m.inclusion == Inclusion::kInconclusive) a.status = kExitUndecided;
  }
  a.result = {{"label", rep.label},
              {"limit_lengths", rep.limit_lengths},
              {"strictly_decreasing", rep.strictly_decreasing},
              {"non_increasing", rep.non_increasing},
              {"members", std::move(members)}};
  return a;
}

Artifact cmd_gap(const Options& o, json& config, std::ostream& err) {
  config["space"] = o.space;
  const auto space = parse_space(o.space);
  const auto copts = check_options(o, *space, config);
  if (o.k < 2) throw Error(ErrorKind::kInvalidArgument, "gap needs --k >= 2");
  const double a_ = parse_scalar(o.a);
  const double b_ = parse_scalar(o.b);
  const double eps = o.eps.empty() ? 0.0 : parse_scalar(o.eps);
  if (eps < 0.0) throw Error(ErrorKind::kInvalidArgument, "eps must be nonnegative");
  std::optional<double> R;
  if (!o.R.empty()) R = positive(o.R, "R");
  const auto s = spectrum_1_over_k(space, o.k, R ? R : std::optional<double>(b_), copts);
  config["k"] = o.k;
  config["R"] = s.R;
  config["a"] = a_;
  config["b"] = b_;
  config["eps"] = eps;
  const auto g = gap_check(s, a_, b_, eps);

  Artifact a;
  json occ = json::array(), und = json::array();
  a.columns = {"verdict", "length", "status"};
  for (const auto& e : g.occupied) {
    occ.push_back(e.length);
    a.rows.push_back({to_string(g.verdict), num(e.length), "occupied"});
  }
  for (const auto& e : g.undecided) {
    und.push_back(e.length);
    a.rows.push_back({to_string(g.verdict), num(e.length), "undecided"});
  }
  if (a.rows.empty()) a.rows.push_back({to_string(g.verdict), "", ""});
  a.result = {{"verdict", to_string(g.verdict)}, {"occupied", occ}, {"undecided", und}, {"complete", s.complete}};
  if (g.verdict == GapVerdict::kInconclusive) {
    a.status = kExitUndecided;
    err << "gap inconclusive: " << g.undecided.size() << " undecided lengths\n";
  }
  return a;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Length spectra, minimizing indices and energy critical points on length spaces", "lsl"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "worker cap (default: LSL_THREADS, else 1)")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", kVersion);

  auto common = [&](CLI::App* s, bool with_space = true) {
    if (with_space) s->add_option("--space", o.space, "space spec")->required();
    s->add_option("-o,--out", o.out, "output file (default: stdout)");
    s->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto checks = [&](CLI::App* s) {
    s->add_option("--delta", o.delta, "grid step for non-graph minimizing checks");
    s->add_option("--delta-floor", o.delta_floor, "smallest grid step before a check is undecided");
  };

  auto* spec = app.add_subcommand("spectrum", "1/k or full length spectrum");
  common(spec);
  checks(spec);
  spec->add_option("--k", o.k, "window index (omit for the full spectrum)");
  spec->add_option("--R", o.R, "truncation radius (default: k * diameter)");
  spec->add_flag("--open", o.open, "openly 1/k geodesics only");

  auto* mi = app.add_subcommand("minind", "minimizing index of the space");
  common(mi);
  checks(mi);
  mi->add_option("--kmax", o.kmax, "largest k tried");

  auto* sy = app.add_subcommand("systole", "shortest closed geodesic of a metric graph");
  common(sy);

  auto* en = app.add_subcommand("energy", "critical points of the uniform energy");
  common(en);
  en->add_option("--k", o.k, "tuple size (omit for the open-index search)");
  en->add_option("--kmax", o.kmax, "largest k for the open-index search");
  en->add_option("--starts", o.starts, "random starts per k");
  en->add_option("--seed", o.seed, "random seed");
  en->add_flag("--no-hessian", o.no_hessian, "skip Hessian indices");

  auto* gh = app.add_subcommand("gh", "Gromov-Hausdorff upper bound between two spaces");
  common(gh);
  gh->add_option("--target", o.target, "second space spec")->required();
  gh->add_option("--r", o.r, "net radius")->required();
  gh->add_option("--method", o.method, "greedy or exact")->check(CLI::IsMember({"greedy", "exact"}));
  gh->add_option("--density", o.density, "probe density (default: r/4)");

  auto* cv = app.add_subcommand("converge", "spectra along a converging family");
  common(cv, false);
  cv->add_option("--family", o.family, "torus-collapse, constant or ellipsoid-flatten")->required();
  cv->add_option("--params", o.params, "comma-separated family parameters")->required();
  cv->add_option("--space", o.space, "member of the constant family (default circle:pi)");
  cv->add_option("--k", o.k, "window index (default 4)");
  cv->add_option("--R", o.R, "truncation radius (default 10)");
  cv->add_option("--eps", o.eps, "inclusion tolerance (default 1)");
  cv->add_flag("--no-gh", o.no_gh, "skip distance bounds");
  cv->add_option("--plot", o.plot, "also write the per-member table as CSV");

  auto* gp = app.add_subcommand("gap", "whether [a, b] avoids the 1/k spectrum");
  common(gp);
  checks(gp);
  gp->add_option("--k", o.k, "window index")->required();
  gp->add_option("--a", o.a, "interval start")->required();
  gp->add_option("--b", o.b, "interval end")->required();
  gp->add_option("--eps", o.eps, "margin (default 0)");
  gp->add_option("--R", o.R, "truncation radius (default b)");

  std::vector<std::string> argv_store{"lsl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  if (o.threads > 0) set_thread_count(o.threads);

  try {
    json config;
    Artifact a;
    std::string name;
    if (*spec) {
      name = "spectrum";
      a = cmd_spectrum(o, config, err);
    } else if (*mi) {
      name = "minind";
      a = cmd_minind(o, config);
    } else if (*sy) {
      name = "systole";
      a = cmd_systole(o, config);
    } else if (*en) {
      name = "energy";
      a = cmd_energy(o, config);
    } else if (*gh) {
      name = "gh";
      a = cmd_gh(o, config);
    } else if (*cv) {
      name = "converge";
      a = cmd_converge(o, config, "circle:pi");
    } else {
      name = "gap";
      a = cmd_gap(o, config, err);
    }
    config["format"] = o.format;
    write_text(o.out, render(name, config, a, o.format), out);
    if (!o.plot.empty()) write_text(o.plot, csv_table(name, config, a), out);
    return a.status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace lsl
