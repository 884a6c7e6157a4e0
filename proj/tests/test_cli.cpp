#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "csflow/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "csflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = csflow::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("csflow_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

}  // namespace

TEST(Run, ZeroTmaxWritesOneRecord) {
  const auto dir = scratch("tmax0");
  const auto r = invoke({"run", "--shape", "circle", "--tmax", "0", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(dir / "trajectory.csv"), 1u);
  EXPECT_EQ(data_rows(dir / "events.csv"), 0u);
  EXPECT_TRUE(fs::exists(dir / "snapshot_00000000.csv"));
  EXPECT_TRUE(fs::exists(dir / "run_info.json"));
  EXPECT_NE(r.out.find("termination=max_time"), std::string::npos);
  EXPECT_NE(r.out.find("events=0"), std::string::npos);
}

TEST(Run, CirclePresetEndsNearOneHalf) {
  const auto dir = scratch("circle");
  const auto r = invoke({"run", "--preset", "circle", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csflow::io::read_trajectory_csv(dir / "trajectory.csv");
  EXPECT_NEAR(rows.back().t, 0.5, 0.01);
}

TEST(Run, ByteIdenticalReruns) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::vector<std::string> common = {"run", "--shape", "infinity_y", "--n", "128", "--tmax", "0.02", "--svg"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", a.string()});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", b.string()});
  ASSERT_EQ(invoke(args_a).code, 0);
  ASSERT_EQ(invoke(args_b).code, 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
  }
}

TEST(Run, SvgAndRescaled) {
  const auto dir = scratch("svg");
  const auto r = invoke({"run", "--shape", "ellipse", "--n", "64", "--tmax", "0.01", "--record-every", "5", "--svg",
                         "--rescaled", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t svgs = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".svg") continue;
    ++svgs;
    const auto s = slurp(entry.path());
    EXPECT_EQ(s.find("<path"), s.rfind("<path"));
  }
  EXPECT_GT(svgs, 1u);
}

TEST(Run, FrozenDiffusivityIsRecorded) {
  const auto dir = scratch("frozen");
  ASSERT_EQ(invoke({"run", "--shape", "circle", "--n", "64", "--tmax", "0.001", "--frozen-diffusivity", "--out",
                    dir.string()})
                .code,
            0);
  const auto info = json::parse(slurp(dir / "run_info.json"));
  EXPECT_TRUE(info["config"]["frozen_diffusivity"].get<bool>());
}

TEST(Run, UsageErrors) {
  const auto dir = scratch("usage");
  const std::string out = dir.string();
  EXPECT_EQ(invoke({"run", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--preset", "circle", "--shape", "circle", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--preset", "nope", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "blob", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "circle", "--param", "radius", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "circle", "--param", "colour=1", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "circle", "--h", "-1", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "circle", "--n", "7", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "circle", "--h", "abc", "--out", out}).code, 2);
  EXPECT_EQ(invoke({"run", "--shape", "circle", "--seedless", "--out", out}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
}

TEST(Run, ParamOverridesShape) {
  const auto dir = scratch("param");
  ASSERT_EQ(invoke({"run", "--shape", "circle", "--param", "radius=2", "--n", "256", "--tmax", "0", "--out",
                    dir.string()})
                .code,
            0);
  const auto rows = csflow::io::read_trajectory_csv(dir / "trajectory.csv");
  EXPECT_NEAR(rows[0].length, 4 * std::numbers::pi, 1e-3);
}

TEST(Config, FileWithFlagOverride) {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.conf");
    cfg << "shape=ellipse\nparam=a=2\nn=64\ntmax=0.01\nrecord-every=1\n";
  }
  const auto out = dir / "out";
  auto r = invoke({"run", "--config", (dir / "run.conf").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(out / "trajectory.csv"), 101u);
  const auto info = json::parse(slurp(out / "run_info.json"));
  EXPECT_EQ(info["shape"]["kind"], "ellipse");
  EXPECT_EQ(info["shape"]["params"]["a"], 2.0);

  r = invoke({"run", "--config", (dir / "run.conf").string(), "--tmax", "0", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(out / "trajectory.csv"), 1u);
}

TEST(Config, MissingFileIsUsageError) {
  EXPECT_EQ(invoke({"run", "--config", "/nonexistent/csflow.conf"}).code, 2);
}

TEST(Env, OutputDirectoryFromEnvironment) {
  const auto dir = scratch("env");
  ::setenv("CSFLOW_OUT", dir.string().c_str(), 1);
  const auto r = invoke({"run", "--shape", "circle", "--n", "64", "--tmax", "0"});
  ::unsetenv("CSFLOW_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(Analyze, EmptyDirectoryIsUsageError) {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  EXPECT_EQ(invoke({"analyze", "--out", dir.string()}).code, 2);
}

TEST(Analyze, PriorRunDirectory) {
  const auto dir = scratch("prior");
  ASSERT_EQ(invoke({"run", "--shape", "circle", "--n", "64", "--tmax", "0.05", "--out", dir.string()}).code, 0);
  const auto r = invoke({"analyze", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto report = json::parse(slurp(dir / "report.json"));
  ASSERT_TRUE(report.contains("length_monotone"));
  for (const char* field : {"value", "expected", "tolerance", "pass"}) {
    EXPECT_TRUE(report["length_monotone"].contains(field)) << field;
  }
  EXPECT_TRUE(report["length_monotone"]["pass"].get<bool>());
}

TEST(Analyze, CirclePresetPasses) {
  const auto dir = scratch("analyze_circle");
  const auto r = invoke({"analyze", "--preset", "circle", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto report = json::parse(slurp(dir / "report.json"));
  for (const char* key : {"circle_law", "circle_recursion", "extinction_time", "length_monotone", "kappa_monotone"}) {
    ASSERT_TRUE(report.contains(key)) << key;
    EXPECT_TRUE(report[key]["pass"].get<bool>()) << key;
  }
}

TEST(Analyze, ExitCodeReflectsChecks) {
  const auto dir = scratch("analyze_dcs");
  const auto r = invoke({"analyze", "--preset", "dcs", "--out", dir.string()});
  const auto report = json::parse(slurp(dir / "report.json"));
  ASSERT_TRUE(report.contains("dcs_first_step"));
  ASSERT_TRUE(report.contains("dcs_series"));
  bool all = true;
  for (const auto& [key, entry] : report.items()) all = all && entry["pass"].get<bool>();
  EXPECT_EQ(r.code, all ? 0 : 3);
}

TEST(Analyze, FailingCheckGivesExitThree) {
  const auto dir = scratch("analyze_fail");
  ASSERT_EQ(invoke({"run", "--shape", "circle", "--n", "64", "--tmax", "0.01", "--out", dir.string()}).code, 0);
  auto info = json::parse(slurp(dir / "run_info.json"));
  info["checks"].push_back({{"name", "extinction_time"}, {"expected", 0.5}, {"tolerance", 0.01}});
  std::ofstream(dir / "run_info.json") << info.dump(2);
  EXPECT_EQ(invoke({"analyze", "--out", dir.string()}).code, 3);
  EXPECT_FALSE(json::parse(slurp(dir / "report.json"))["extinction_time"]["pass"].get<bool>());
}

TEST(Sweep, GridOverH) {
  const auto dir = scratch("sweep");
  const auto r = invoke({"sweep", "--shape", "circle", "--n", "64", "--tmax", "1", "--grid", "h=1e-3,5e-4",
                         "--probe", "0.25", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "h_000" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir / "h_001" / "trajectory.csv"));
  std::ifstream in(dir / "sweep_summary.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csflow::cli::sweep_header());
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rfind("h,0.001,ok,", 0), 0u) << rows[0];
}

TEST(Sweep, ExtinctionErrorShrinksWithH) {
  const auto dir = scratch("sweep_ext");
  ASSERT_EQ(invoke({"sweep", "--preset", "circle", "--n", "64", "--grid", "h=1e-3,1e-4,1e-5", "--out",
                    dir.string()})
                .code,
            0);
  // the 64-gon follows the circle law for its own perimeter
  const double l0 = 2.0 * 64 * std::sin(std::numbers::pi / 64);
  const double t_ext = l0 * l0 / (8 * std::numbers::pi * std::numbers::pi);
  std::vector<double> errors;
  for (const char* sub : {"h_000", "h_001", "h_002"}) {
    const auto rows = csflow::io::read_trajectory_csv(dir / sub / "trajectory.csv");
    errors.push_back(std::abs(rows.back().t - t_ext));
  }
  EXPECT_GT(errors[0], errors[1]);
  EXPECT_GT(errors[1], errors[2]);
}

TEST(Sweep, EmptyGridIsUsageError) {
  const auto dir = scratch("sweep_empty");
  EXPECT_EQ(invoke({"sweep", "--preset", "circle", "--grid", "h=", "--out", dir.string()}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--preset", "circle", "--out", dir.string()}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--preset", "circle", "--grid", "q=1,2", "--out", dir.string()}).code, 2);
}

TEST(Executable, ExitCodes) {
  const std::string exe = CSFLOW_EXE;
  const int seedless = std::system((exe + " run --shape circle --seedless > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(seedless), 2);
  const int help = std::system((exe + " --help > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(help), 0);
}
