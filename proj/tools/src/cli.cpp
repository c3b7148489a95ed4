#include "jetscope/tools/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "jetscope/classify.hpp"
#include "jetscope/field_io.hpp"
#include "jetscope/pde.hpp"
#include "jetscope/signals.hpp"
#include "jetscope/tools/suites.hpp"

namespace jetscope::cli {

namespace {

struct Settings {
  std::string input;
  std::string format = "text";
  std::string signal;
  std::string grid = "16385";
  std::string points = "0";
  std::string ladder = "0.125:7";
  std::string region = "box";
  std::string out;
  int k_max = 3;
  int i = 0;
  double p = 2.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string suite;
  std::string demo;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double to_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::InvalidArgument, "cannot parse " + what + " from '" + text + "'");
}

int to_int(const std::string& text, const std::string& what) {
  const double v = to_number(text, what);
  require(v == std::floor(v) && std::abs(v) < 1e9, what + " must be an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_ladder(const std::string& text) {
  const auto parts = split(text, ':');
  require(parts.size() == 2, "ladder must be r0:count");
  const double r0 = to_number(parts[0], "ladder r0");
  const int count = to_int(parts[1], "ladder count");
  require(r0 > 0.0 && count >= 4 && count <= 30, "ladder needs r0 > 0 and 4 <= count <= 30");
  return classify::dyadic_ladder(r0, count);
}

Grid parse_grid(const std::string& text) {
  const auto parts = split(text, 'x');
  require(parts.size() == 1 || parts.size() == 2, "grid must be N or NxN");
  const int n = to_int(parts[0], "grid size");
  require(n >= 9, "grid needs at least 9 nodes per axis");
  if (parts.size() == 1) return Grid::line(-1.0, 1.0, n);
  require(to_int(parts[1], "grid size") == n, "2D grids must be square");
  return Grid::square(-1.0, 1.0, n);
}

SampledField load_field(const Settings& s, bool allow_constant) {
  if (!s.input.empty()) {
    require(s.signal.empty(), "give either --input or --signal, not both");
    return read_field(s.input, parse_format(s.format));
  }
  require(!s.signal.empty(), "no input: give --input or --signal");
  const Grid grid = parse_grid(s.grid);
  if (allow_constant && s.signal.rfind("constant:", 0) == 0) {
    const double c = to_number(s.signal.substr(9), "constant value");
    return SampledField::sample(grid, [c](const Point&) { return c; });
  }
  return make_signal(parse_signal(s.signal), grid);
}

std::vector<Point> parse_points(const std::string& text, const Grid& grid, std::uint64_t seed) {
  if (text.rfind("random:", 0) == 0) {
    const auto parts = split(text.substr(7), ':');
    const int count = to_int(parts[0], "random point count");
    const double margin = parts.size() > 1 ? to_number(parts[1], "random point margin") : 0.2;
    require(count >= 1 && count <= 100000, "random point count must lie in [1, 100000]");
    return classify::sample_points(grid, count, seed, margin);
  }
  std::vector<Point> points;
  for (const auto& item : split(text, ';')) {
    const auto coords = split(item, ',');
    require(static_cast<int>(coords.size()) == grid.dim(), "point '" + item + "' does not match the grid dimension");
    Point p{};
    for (std::size_t d = 0; d < coords.size(); ++d) p[d] = to_number(coords[d], "point coordinate");
    require(grid.contains(p), "point '" + item + "' lies outside the grid box");
    points.push_back(p);
  }
  require(!points.empty(), "no points given");
  return points;
}

Region parse_region(const std::string& text, const Grid& grid) {
  if (text == "box") return grid.box();
  const auto parts = split(text, ':');
  require(parts.size() == 3 && parts[0] == "ball", "region must be 'box' or 'ball:<center>:<radius>'");
  const auto coords = split(parts[1], ',');
  require(static_cast<int>(coords.size()) == grid.dim(), "region center does not match the grid dimension");
  Point c{};
  for (std::size_t d = 0; d < coords.size(); ++d) c[d] = to_number(coords[d], "region center");
  const Ball b(c, to_number(parts[2], "region radius"));
  require(b.radius > 0.0 && grid.contains(b), "region ball must have positive radius and fit in the grid box");
  return b;
}

Json grid_json(const Grid& g) {
  Json shape = Json::array({g.nodes(0)});
  Json box = Json::array({g.lo(0), g.hi(0)});
  if (g.dim() == 2) {
    shape.push_back(g.nodes(1));
    box.push_back(g.lo(1));
    box.push_back(g.hi(1));
  }
  return {{"dim", g.dim()}, {"shape", shape}, {"box", box}};
}

Json source_json(const Settings& s) {
  if (!s.input.empty()) return {{"input", std::filesystem::path(s.input).filename().string()}, {"format", s.format}};
  return {{"signal", s.signal}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  os << text;
  if (!os) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

std::filesystem::path out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory '" + out + "'");
  return out;
}

int cmd_analyze(const Settings& s, std::ostream& out) {
  const norms::NormSpec spec(s.i, s.p);
  require(s.k_max >= 0 && s.k_max <= 8, "k-max must lie in [0, 8]");
  require(s.jobs >= 1, "jobs must be at least 1");
  const auto ladder = parse_ladder(s.ladder);
  const SampledField field = load_field(s, false);
  const Grid& grid = field.grid();
  const auto points = parse_points(s.points, grid, s.seed);
  for (const Point& a : points)
    require(grid.contains(Ball(a, ladder.front())), "coarsest ball around a query point leaves the grid box");
  const auto t = DistributionRep::from_field(field);

  std::vector<std::optional<classify::OrderReport>> reports(points.size());
  std::vector<std::optional<Error>> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < points.size(); idx = next++) {
      try {
        reports[idx] = classify::classify_point(t, points[idx], s.k_max, spec, ladder);
      } catch (const Error& e) {
        errors[idx] = e;
      }
    }
  };
  const int threads = std::min<int>(s.jobs, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) throw *e;

  Json doc;
  doc["command"] = "analyze";
  doc["source"] = source_json(s);
  doc["grid"] = grid_json(grid);
  doc["spec"] = {{"i", spec.i}, {"p", spec.p}};
  doc["k_max"] = s.k_max;
  doc["ladder"] = ladder;
  Json list = Json::array();
  bool inconclusive = false;
  for (const auto& r : reports) {
    list.push_back(classify::to_json(*r, false));
    inconclusive = inconclusive || r->inconclusive;
  }
  doc["reports"] = list;
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (!s.out.empty()) {
    const auto dir = out_dir(s.out);
    write_text(dir / "analyze.json", text);
    for (std::size_t idx = 0; idx < reports.size(); ++idx)
      write_text(dir / ("profile_" + std::to_string(idx) + ".csv"), classify::profile_csv(*reports[idx]));
  }
  return inconclusive ? kInconclusive : kOk;
}

int cmd_verify(const Settings& s, std::ostream& out) {
  require(s.jobs >= 1, "jobs must be at least 1");
  const VerifierReport rep = suites::run(s.suite, {s.seed, s.jobs});
  Json doc;
  doc["command"] = "verify";
  doc["suite"] = s.suite;
  doc["seed"] = s.seed;
  doc["pass"] = rep.pass();
  doc["violations"] = rep.violations();
  doc["report"] = to_json(rep);
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (!s.out.empty()) write_text(out_dir(s.out) / ("verify_" + s.suite + ".json"), text);
  return rep.pass() ? kOk : kViolation;
}

int cmd_solve(const Settings& s, std::ostream& out) {
  require(s.i >= 1 && s.i <= 4, "solve needs 1 <= i <= 4");
  require(!s.out.empty(), "solve needs --out for the solution field");
  const FieldFormat format = parse_format(s.format);
  const SampledField f = load_field(s, true);
  const Region region = parse_region(s.region, f.grid());
  const SampledField u = pde::solve_polylaplacian(f, region, s.i);
  write_field(u, s.out, format);
  double max_abs = 0.0;
  for (double v : u.values()) max_abs = std::max(max_abs, std::abs(v));
  Json doc;
  doc["command"] = "solve";
  doc["source"] = source_json(s);
  doc["grid"] = grid_json(f.grid());
  doc["i"] = s.i;
  doc["region"] = s.region;
  doc["max_abs"] = max_abs;
  doc["output"] = s.out;
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_demo(const Settings& s, std::ostream& out) {
  const Grid grid = parse_grid(s.grid);
  if (!s.demo.empty()) {
    const SampledField f = make_signal(parse_signal(s.demo), grid);
    if (s.out.empty())
      write_field_text(f, out);
    else
      write_field(f, s.out, parse_format(s.format));
    return kOk;
  }
  // Classification of every built-in signal at the origin.
  const auto ladder = parse_ladder(s.ladder);
  const norms::NormSpec spec(s.i, s.p);
  Json list = Json::array();
  bool inconclusive = false;
  for (const std::string name : {"absx", "xabsx", "heaviside", "weierstrass", "smooth", "bump"}) {
    const auto t = DistributionRep::from_field(make_signal(parse_signal(name), grid));
    const auto r = classify::classify_point(t, Point{}, s.k_max, spec, ladder);
    list.push_back({{"signal", name},
                    {"k_star", r.k_star},
                    {"alpha_star", r.alpha_star},
                    {"inconclusive", r.inconclusive}});
    inconclusive = inconclusive || r.inconclusive;
  }
  Json doc;
  doc["command"] = "demo";
  doc["grid"] = grid_json(grid);
  doc["spec"] = {{"i", spec.i}, {"p", spec.p}};
  doc["signals"] = list;
  out << doc.dump(2) << "\n";
  return inconclusive ? kInconclusive : kOk;
}

void emit_error(std::ostream& err, std::string_view code, const std::string& message) {
  Json e;
  e["code"] = code;
  e["message"] = message;
  err << e.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"jetscope: pointwise regularity of sampled distributions"};
  app.name("jetscope");
  app.set_config("--config", "", "flat key=value configuration file; command-line flags win");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--input", s.input, "field file to analyze");
  app.add_option("--format", s.format, "field file format")->check(CLI::IsMember({"text", "bin"}));
  app.add_option("--signal", s.signal, "built-in signal: absx, xabsx, heaviside, smooth, bump, weierstrass[:beta[:m_max]]");
  app.add_option("--grid", s.grid, "nodes per axis on [-1,1]: N or NxN");
  app.add_option("--points", s.points, "query points 'x;y' or 'x0,x1;...' or random:N[:margin]");
  app.add_option("--k-max", s.k_max, "largest jet degree tested");
  app.add_option("--i", s.i, "derivative order of the seminorm");
  app.add_option("--p", s.p, "exponent of the test-function seminorm");
  app.add_option("--ladder", s.ladder, "dyadic scale ladder r0:count");
  app.add_option("--seed", s.seed, "seed for random points and suites");
  app.add_option("--jobs", s.jobs, "worker threads");
  app.add_option("--out", s.out, "output directory (analyze, verify) or file (solve, demo)");
  app.add_option("--region", s.region, "solve region: box or ball:<center>:<radius>");

  auto* analyze = app.add_subcommand("analyze", "classify the order of a field at query points");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", s.suite, "suite name")->required();
  auto* solve = app.add_subcommand("solve", "solve the poly-Laplacian Dirichlet problem");
  auto* demo = app.add_subcommand("demo", "emit a built-in signal, or classify all of them at 0");
  demo->add_option("name", s.demo, "signal to emit");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, to_string(ErrorCode::InvalidArgument), e.what());
    err << app.help();
    return kFailure;
  }

  try {
    if (verify->parsed() && !suites::is_suite(s.suite)) {
      std::string all;
      for (const auto& n : suites::names()) all += (all.empty() ? "" : ", ") + n;
      emit_error(err, to_string(ErrorCode::InvalidArgument), "unknown suite '" + s.suite + "'; expected one of " + all);
      err << verify->help();
      return kFailure;
    }
    if (analyze->parsed()) return cmd_analyze(s, out);
    if (verify->parsed()) return cmd_verify(s, out);
    if (solve->parsed()) return cmd_solve(s, out);
    if (demo->parsed()) return cmd_demo(s, out);
  } catch (const Error& e) {
    emit_error(err, to_string(e.code()), e.what());
    return kFailure;
  } catch (const std::exception& e) {
    emit_error(err, to_string(ErrorCode::IoError), e.what());
    return kFailure;
  }
  return kFailure;
}

}  // namespace jetscope::cli
