#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jetscope/field_io.hpp"
#include "jetscope/tools/cli.hpp"
#include "jetscope/tools/suites.hpp"

using namespace jetscope;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "jetscope_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json first_line_json(const std::string& text) { return json::parse(text.substr(0, text.find('\n'))); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, MissingSubcommandIsAnError) {
  const auto r = run({});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_EQ(first_line_json(r.err)["code"], "InvalidArgument");
}

TEST(Cli, HelpSucceeds) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("analyze"), std::string::npos);
}

TEST(Cli, UnknownSuiteListsSuites) {
  const auto r = run({"verify", "nonsense"});
  EXPECT_EQ(r.code, cli::kFailure);
  const json e = first_line_json(r.err);
  EXPECT_EQ(e["code"], "InvalidArgument");
  for (const auto& name : suites::names()) EXPECT_NE(r.err.find(name), std::string::npos) << name;
}

TEST(Cli, UnknownSignalReportsCode) {
  const auto r = run({"analyze", "--signal", "sawtooth"});
  EXPECT_EQ(r.code, cli::kFailure);
  const json e = first_line_json(r.err);
  EXPECT_EQ(e["code"], "InvalidArgument");
  EXPECT_NE(e["message"].get<std::string>().find("sawtooth"), std::string::npos);
}

TEST(Cli, MissingInputFileIsIoError) {
  const auto r = run({"analyze", "--input", "/nonexistent/field.txt"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_EQ(first_line_json(r.err)["code"], "IoError");
}

TEST(Cli, AnalyzeClassifiesKink) {
  const auto r = run({"analyze", "--signal", "absx", "--grid", "8193", "--points", "0;0.5", "--k-max", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["command"], "analyze");
  ASSERT_EQ(doc["reports"].size(), 2u);
  EXPECT_EQ(doc["reports"][0]["k_star"], 0);
  EXPECT_EQ(doc["reports"][1]["k_star"], 2);
}

TEST(Cli, AnalyzeWritesArtifacts) {
  const auto dir = scratch_dir("analyze");
  const auto r = run({"analyze", "--signal", "xabsx", "--grid", "4097", "--points", "random:3", "--ladder", "0.125:5",
                      "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(slurp(dir / "analyze.json"), r.out);
  for (int k = 0; k < 3; ++k) {
    const std::string csv = slurp(dir / ("profile_" + std::to_string(k) + ".csv"));
    EXPECT_EQ(csv.rfind("r,k,raw_residual,normalized_residual\r\n", 0), 0u);
  }
  EXPECT_FALSE(fs::exists(dir / "profile_3.csv"));
}

TEST(Cli, AnalyzeIsIndependentOfJobs) {
  const std::vector<std::string> base{"analyze", "--signal", "absx", "--grid", "4097", "--points", "random:5",
                                      "--ladder", "0.125:5"};
  auto with_jobs = [&](const char* j) {
    auto a = base;
    a.insert(a.end(), {"--jobs", j});
    return run(a);
  };
  const auto one = with_jobs("1");
  const auto four = with_jobs("4");
  EXPECT_EQ(one.code, four.code);
  EXPECT_EQ(one.out, four.out);
}

TEST(Cli, RejectsBadLadder) {
  const auto r = run({"analyze", "--signal", "absx", "--ladder", "0.125:2"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_EQ(first_line_json(r.err)["code"], "InvalidArgument");
}

TEST(Cli, ConfigFileWithCommandLineOverride) {
  const auto dir = scratch_dir("config");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "signal=heaviside\ngrid=4097\nk-max=1\nladder=0.125:5\n";
  }
  const auto from_file = run({"analyze", "--config", (dir / "run.ini").string()});
  ASSERT_EQ(from_file.code, cli::kOk) << from_file.err;
  json doc = json::parse(from_file.out);
  EXPECT_EQ(doc["k_max"], 1);
  EXPECT_EQ(doc["source"]["signal"], "heaviside");
  EXPECT_EQ(doc["reports"][0]["k_star"], -1);

  const auto overridden = run({"analyze", "--config", (dir / "run.ini").string(), "--signal", "absx"});
  ASSERT_EQ(overridden.code, cli::kOk) << overridden.err;
  doc = json::parse(overridden.out);
  EXPECT_EQ(doc["source"]["signal"], "absx");
  EXPECT_EQ(doc["reports"][0]["k_star"], 0);
}

TEST(Cli, VerifySuiteWritesReport) {
  const auto dir = scratch_dir("verify");
  const auto r = run({"verify", "criterion", "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["suite"], "criterion");
  EXPECT_EQ(doc["pass"], true);
  EXPECT_EQ(doc["violations"], 0);
  EXPECT_EQ(slurp(dir / "verify_criterion.json"), r.out);
}

TEST(Cli, SolveWritesSolution) {
  const auto dir = scratch_dir("solve");
  const auto path = (dir / "u.txt").string();
  const auto r = run({"solve", "--signal", "constant:1", "--grid", "257", "--i", "1", "--region", "ball:0:1", "--out",
                      path});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto u = read_field(path, FieldFormat::Text);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double x = u.grid().point(k)[0];
    EXPECT_NEAR(u[k], std::abs(x) < 1.0 ? (x * x - 1.0) / 2.0 : 0.0, 1e-12);
  }
  EXPECT_NEAR(json::parse(r.out)["max_abs"].get<double>(), 0.5, 1e-12);
}

TEST(Cli, SolveRequiresOutput) {
  const auto r = run({"solve", "--signal", "constant:1", "--grid", "65", "--i", "1"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_EQ(first_line_json(r.err)["code"], "InvalidArgument");
}

TEST(Cli, SolveRejectsRegionOutsideGrid) {
  const auto r = run({"solve", "--signal", "constant:1", "--grid", "65", "--i", "1", "--region", "ball:0.5:0.9",
                      "--out", (scratch_dir("solve_bad") / "u.txt").string()});
  EXPECT_EQ(r.code, cli::kFailure);
}

TEST(Cli, DemoEmitsField) {
  const auto r = run({"demo", "absx", "--grid", "9"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out, "# jetscope-field v1 dim=1 shape=9 box=-1,1\n1\n0.75\n0.5\n0.25\n0\n0.25\n0.5\n0.75\n1\n");
}

TEST(Cli, DemoFieldFeedsAnalyze) {
  const auto dir = scratch_dir("demo");
  const auto path = (dir / "h.bin").string();
  ASSERT_EQ(run({"demo", "heaviside", "--grid", "4097", "--format", "bin", "--out", path}).code, cli::kOk);
  const auto r = run({"analyze", "--input", path, "--format", "bin", "--k-max", "1", "--ladder", "0.125:5"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["reports"][0]["k_star"], -1);
}
