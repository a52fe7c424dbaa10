#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "app/config.hpp"
#include "app/io.hpp"

namespace fs = std::filesystem;
using starkres::app::ConfigError;
using starkres::app::json;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("starkres_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  std::string cmd = std::string(STARKRES_CLI_PATH) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (at < s.size()) {
    std::size_t e = s.find("\r\n", at);
    out.push_back(s.substr(at, e - at));
    at = e + 2;
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

TEST(Config, UnknownKeysAreRejected) {
  json c = {{"field", {{"B", 1.0}, {"Bfield", 2.0}}}};
  EXPECT_THROW(starkres::app::parse_field(c), ConfigError);
  EXPECT_THROW(starkres::app::check_object(json{{"x", 1}}, "cfg", {"y"}), ConfigError);
  EXPECT_NO_THROW(starkres::app::check_object(json{{"y", 1}}, "cfg", {"y"}));
}

TEST(Config, RangesAreValidated) {
  EXPECT_THROW(starkres::app::parse_field(json{{"field", {{"B", 0.0}}}}), ConfigError);
  EXPECT_THROW(starkres::app::parse_field(json{{"field", {{"F", -0.1}}}}), ConfigError);
  EXPECT_THROW(starkres::app::parse_grid(json{{"grid", {{"N", 32}}}}), ConfigError);
  EXPECT_THROW(starkres::app::parse_eig(json{{"eig", {{"tol", 0.0}}}}, 1), ConfigError);
  EXPECT_THROW(starkres::app::parse_field(json{{"field", {{"z", "half"}}}}), ConfigError);
  auto p = starkres::app::parse_field(json{{"field", {{"B", 2.0}, {"z", {0.5, 0.1}}}}});
  EXPECT_EQ(p.B, 2.0);
  EXPECT_EQ(p.z, starkres::Complex(0.5, 0.1));
}

TEST(Config, ValueRanges) {
  auto v = starkres::app::get_values(json{{"t", {{"from", 0.0}, {"to", 1.0}, {"n", 5}}}}, "t", {}, "c");
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[1], 0.25);
  EXPECT_THROW(starkres::app::get_values(json{{"t", {{"from", 0.0}, {"n", 5}}}}, "t", {}, "c"), ConfigError);
}

TEST(Output, CsvQuotingAndPrecision) {
  starkres::app::Csv csv({"a", "b,c"});
  csv.row({0.1, std::string("say \"hi\"")});
  auto ls = lines(csv.str());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "a,\"b,c\"");
  EXPECT_EQ(ls[1], "1.0000000000000001e-01,\"say \"\"hi\"\"\"");
  double back = std::stod(split(ls[1])[0]);
  EXPECT_EQ(back, 0.1);
  EXPECT_THROW(csv.row({1.0}), std::logic_error);
}

TEST(Cli, SelftestPasses) {
  auto dir = scratch("selftest");
  EXPECT_EQ(run("selftest --out " + dir.string()), 0);
  json r = json::parse(slurp(dir / "selftest.json"));
  EXPECT_TRUE(r.at("passed").get<bool>());
  EXPECT_EQ(r.at("schema_version"), 1);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, ConfigErrorsExitTwo) {
  auto dir = scratch("badcfg");
  auto cfg = write_config(dir, {{"field", {{"B", 1.0}, {"bogus", 1}}}, {"points", {{0, 0, 1, 1}}}});
  EXPECT_EQ(run("green --config " + cfg.string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run("nonsense --out " + dir.string()), 2);
  EXPECT_EQ(run("green --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run("selftest --threads 0 --out " + dir.string()), 2);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(run("green --config " + (dir / "broken.json").string()), 2);
}

TEST(Cli, GreenSinglePoint) {
  auto dir = scratch("green1");
  auto cfg = write_config(dir, {{"schema_version", 1}, {"field", {{"F", 0.05}}}, {"points", {{0, 0, 1.5, 0.5}}}});
  ASSERT_EQ(run("green --config " + cfg.string() + " --out " + dir.string()), 0);
  auto ls = lines(slurp(dir / "green.csv"));
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "x,y,xp,yp,re_G,im_G,abs_err,representation,evals");
  EXPECT_EQ(split(ls[1]).size(), 9u);
  json m = json::parse(slurp(dir / "manifest.json"));
  ASSERT_EQ(m.at("outputs").size(), 1u);
  EXPECT_EQ(m.at("outputs")[0].at("file"), "green.csv");
  EXPECT_FALSE(m.at("reproduction").get<bool>());
}

TEST(Cli, GreenGridOrderAndThreadDeterminism) {
  auto dir = scratch("green10");
  json cfg = {{"field", {{"F", 0.05}}},
              {"grid", {{"x", 0.0}, {"y", 0.0}, {"xp", {{"from", 0.5}, {"to", 3.0}, {"n", 10}}},
                        {"yp", {{"from", -2.0}, {"to", 2.5}, {"n", 10}}}}}};
  auto path = write_config(dir, cfg);
  std::string first;
  for (int threads : {1, 4, 8}) {
    fs::path out = dir / ("t" + std::to_string(threads));
    ASSERT_EQ(run("green --config " + path.string() + " --threads " + std::to_string(threads) + " --out " +
                  out.string()),
              0);
    std::string csv = slurp(out / "green.csv");
    if (first.empty()) first = csv;
    EXPECT_EQ(csv, first) << "threads=" << threads;
  }
  auto ls = lines(first);
  ASSERT_EQ(ls.size(), 101u);
  // row-major in xp, then yp
  EXPECT_EQ(std::stod(split(ls[1])[2]), 0.5);
  EXPECT_EQ(std::stod(split(ls[2])[2]), 0.5);
  EXPECT_EQ(std::stod(split(ls[11])[2]), std::stod(split(ls[12])[2]));
  EXPECT_LT(std::stod(split(ls[1])[3]), std::stod(split(ls[2])[3]));
  // rerun into the same directory is a flagged reproduction
  fs::path out = dir / "t1";
  ASSERT_EQ(run("green --config " + path.string() + " --out " + out.string()), 0);
  json m = json::parse(slurp(out / "manifest.json"));
  EXPECT_TRUE(m.at("reproduction").get<bool>());
  EXPECT_TRUE(m.at("outputs_identical_to_previous").get<bool>());
  EXPECT_EQ(slurp(out / "green.csv"), first);
}

TEST(Cli, KernelRowsAndCaustics) {
  auto dir = scratch("kernel");
  auto cfg = write_config(dir, {{"field", {{"B", 1.0}, {"F", 0.05}}},
                                {"mode", "kernel"},
                                {"kernel", {{"x", 1.0}, {"y", -0.5}, {"t", {0.3, 3.141592653589793, 2.0}}}}});
  ASSERT_EQ(run("propagator --config " + cfg.string() + " --out " + dir.string()), 0);
  auto ls = lines(slurp(dir / "kernel.csv"));
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(split(ls[2]).back(), "caustic");
  for (int r : {1, 3}) {
    auto f = split(ls[r]);
    double t = std::stod(f[0]), mod = std::stod(f[3]);
    EXPECT_NEAR(mod, 1.0 / (4.0 * M_PI * std::abs(std::sin(t))), 1e-14);
    EXPECT_EQ(f.back(), "ok");
  }
}

TEST(Cli, ContaminationExitsFour) {
  auto dir = scratch("contam");
  auto cfg = write_config(dir, {{"field", {{"F", 0.1}, {"b", 1.0}}},
                                {"potential", {{"V0", 0.0}}},
                                {"grid", {{"L", 7.0}, {"N", 64}}},
                                {"target", {0.8, 0.0}}});
  EXPECT_EQ(run("resonance --config " + cfg.string() + " --out " + dir.string()), 4);
  json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m.at("tasks")[0].at("exit_code"), 4);
  EXPECT_TRUE(m.at("outputs").empty());
}

TEST(Cli, ResonanceReportsStripEigenvalues) {
  auto dir = scratch("res");
  auto cfg = write_config(dir, {{"field", {{"F", 0.1}, {"b", 1.0}}}, {"grid", {{"L", 7.0}, {"N", 64}}}, {"count", 4}});
  ASSERT_EQ(run("resonance --config " + cfg.string() + " --out " + dir.string()), 0);
  json r = json::parse(slurp(dir / "resonance.json"));
  for (const json& e : r.at("resonances").at("eigenvalues")) {
    double im = e.at("E")[1];
    EXPECT_GT(im, -0.1);
    EXPECT_LE(im, 1e-8);
  }
  EXPECT_TRUE(r.contains("bound_state"));
}

TEST(Cli, NormDriftExitsFive) {
  auto dir = scratch("drift");
  auto cfg = write_config(dir, {{"field", {{"F", 0.1}, {"b", 1.0}}},
                                {"grid", {{"L", 7.0}, {"N", 64}}},
                                {"survival", {{"t_end", 2.0}, {"dt", 0.05}, {"drift_tol", 1e-20}}}});
  EXPECT_EQ(run("survival --config " + cfg.string() + " --out " + dir.string()), 5);
}

TEST(Cli, SyntheticWidthInSelftest) {
  auto dir = scratch("synth");
  ASSERT_EQ(run("selftest --seed 7 --out " + dir.string()), 0);
  json r = json::parse(slurp(dir / "selftest.json"));
  bool seen = false;
  for (const json& c : r.at("checks"))
    if (c.at("name") == "synthetic_width") {
      seen = true;
      EXPECT_NEAR(c.at("value").get<double>(), 0.2, 1e-3);
    }
  EXPECT_TRUE(seen);
}
