#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace evbreak::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "evbreak");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("evbreak_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
    data = (dir / "maxima.csv").string();
    const auto r = invoke({"generate", std::string(EVBREAK_SOURCE_DIR) + "/configs/fixtures/annual_maxima_break.json",
                           "--index-column", "year", "--out", data});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  void TearDown() override { fs::remove_all(dir); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream(dir / name, std::ios::binary) << text;
  }

  fs::path dir;
  std::string data;
};

TEST_F(Cli, BreakAdaptedReportEchoesParameters) {
  const auto r = invoke({"test", data, "--index-column", "year", "--break", "48/86", "--B", "300", "--seed", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_FALSE(rep["tool"]["kernels"].get<std::string>().empty());
  EXPECT_EQ(rep["input"]["n"], 86);
  EXPECT_EQ(rep["input"]["d"], 2);
  EXPECT_EQ(rep["input"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(rep["parameters"]["breaks"][0].get<double>(), 48.0 / 86.0);
  EXPECT_EQ(rep["parameters"]["break_indices"][0], 48);
  EXPECT_EQ(rep["parameters"]["B"], 300);
  EXPECT_EQ(rep["parameters"]["variant"], "break-adapted");
  const double p = rep["result"]["p_value"];
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
  const std::size_t k = rep["result"]["argmax_k"];
  EXPECT_EQ(rep["result"]["argmax_label"], std::to_string(k));
  ASSERT_EQ(rep["pickands"].size(), 3u);
  EXPECT_EQ(rep["pickands"][1]["window"][1], k);
  EXPECT_EQ(rep["pickands"][0]["A"].size(), 9u);
}

TEST_F(Cli, FixedSeedGivesByteIdenticalReports) {
  const std::vector<std::string> args{"test", data, "--index-column", "year", "--B", "200", "--seed", "5",
                                      "--out", (dir / "run").string(), "--plot-data"};
  ASSERT_EQ(invoke(args).code, 0);
  const std::string first = slurp(dir / "run" / "report.json");
  const std::string field = slurp(dir / "run" / "field.csv");
  ASSERT_EQ(invoke(args).code, 0);
  EXPECT_EQ(slurp(dir / "run" / "report.json"), first);
  EXPECT_EQ(slurp(dir / "run" / "field.csv"), field);
  EXPECT_EQ(field.substr(0, 6), "s,t,D\n");
  EXPECT_EQ(slurp(dir / "run" / "pickands.csv").substr(0, 15), "segment,t,A\nall");
}

TEST_F(Cli, EchoedParametersReproduceTheResult) {
  const auto r = invoke({"test", data, "--index-column", "year", "--break", "0.4", "--grid", "0.2,0.5,0.8", "--B",
                         "150", "--seed", "3", "--alpha", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  const auto& p = rep["parameters"];
  std::string grid;
  for (const auto& t : p["grid"]["points"]) grid += (grid.empty() ? "" : ",") + t.dump();
  const auto again = invoke({"test", data, "--index-column", "year", "--break", p["breaks"][0].dump(), "--grid", grid,
                             "--B", p["B"].dump(), "--seed", p["seed"].dump(), "--alpha", p["alpha"].dump(),
                             "--bandwidth", p["bandwidth"].dump()});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(json::parse(again.out)["result"], rep["result"]);
  EXPECT_EQ(json::parse(again.out)["pickands"], rep["pickands"]);
}

TEST_F(Cli, PlainPrefactorWithoutBreakMatchesPlainTest) {
  const auto a = invoke({"test", data, "--index-column", "year", "--B", "100"});
  const auto b = invoke({"test", data, "--index-column", "year", "--B", "100", "--prefactor", "plain"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(json::parse(a.out)["result"], json::parse(b.out)["result"]);
}

TEST_F(Cli, FixedIndexVariant) {
  const auto r = invoke({"test", data, "--index-column", "year", "--kstar", "48", "--B", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["result"]["argmax_k"], 48);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
  EXPECT_EQ(invoke({"test", data, "--index-column", "year", "--break", "1.5"}).code, kUsage);
  EXPECT_EQ(invoke({"test", data, "--index-column", "year", "--break", "abc"}).code, kUsage);
  EXPECT_EQ(invoke({"test", data, "--index-column", "year", "--kstar", "86"}).code, kUsage);
  EXPECT_EQ(invoke({"test", data, "--index-column", "year", "--bandwidth", "0.9"}).code, kUsage);
  EXPECT_EQ(invoke({"test", data, "--index-column", "year", "--grid", "0.2:0.3"}).code, kUsage);
  EXPECT_EQ(invoke({"test", data, "--no-such-flag"}).code, kUsage);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(invoke({"test", (dir / "missing.csv").string()}).code, kData);
  write("bad.csv", "a,b\n1,2\n3,x\n");
  const auto bad = invoke({"test", (dir / "bad.csv").string()});
  EXPECT_EQ(bad.code, kData);
  EXPECT_NE(bad.err.find("line 3"), std::string::npos);
  write("short.csv", "a,b\n1,2\n3,4\n5,6\n");
  EXPECT_EQ(invoke({"test", (dir / "short.csv").string()}).code, kData);
  write("one.csv", "a\n1\n2\n");
  EXPECT_EQ(invoke({"test", (dir / "one.csv").string()}).code, kData);
}

TEST_F(Cli, MissingRowsAreDroppedAndCounted) {
  std::string text = slurp(data);
  const auto pos = text.find('\n', text.find('\n') + 1);
  const auto next = text.find(',', pos + 1);
  text.replace(next + 1, text.find(',', next + 1) - next - 1, "NA");
  write("holes.csv", text);
  const auto r = invoke({"test", (dir / "holes.csv").string(), "--index-column", "year", "--B", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_EQ(rep["input"]["rows_read"], 86);
  EXPECT_EQ(rep["input"]["rows_dropped"], 1);
  EXPECT_EQ(rep["input"]["n"], 85);
}

TEST_F(Cli, SimulateWritesDeterministicTables) {
  const std::string config = std::string(EVBREAK_SOURCE_DIR) + "/configs/smoke.json";
  const auto a = invoke({"simulate", config, "--out", (dir / "w1").string(), "--workers", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = invoke({"simulate", config, "--out", (dir / "w3").string(), "--workers", "3"});
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string results = slurp(dir / "w1" / "results.csv");
  EXPECT_EQ(slurp(dir / "w3" / "results.csv"), results);
  EXPECT_EQ(results.substr(0, 11), "experiment,");
  EXPECT_TRUE(fs::exists(dir / "w1" / "timing.csv"));
  EXPECT_NE(a.out.find("smoke"), std::string::npos);
}

TEST_F(Cli, SimulateReportsSchemaErrorsWithPaths) {
  write("empty_sweep.json", R"({"name": "x", "scenario": {"segments": [{"copula": {"a": [0, 0], "vartheta": 2}}]},
                                "n": [20], "sweep": {"parameter": "vartheta", "values": []}})");
  const auto r = invoke({"simulate", (dir / "empty_sweep.json").string()});
  EXPECT_EQ(r.code, kData);
  EXPECT_NE(r.err.find("/sweep/values"), std::string::npos);
}

TEST_F(Cli, SimulateFailsOnInfeasibleCell) {
  write("tiny.json", R"({"name": "x", "scenario": {"segments": [{"end": 0.01, "copula": {"a": [0, 0], "vartheta": 2}},
                                                                {"copula": {"a": [0, 0], "vartheta": 2}}]},
                          "n": [20], "B": 10, "replications": 2})");
  const auto r = invoke({"simulate", (dir / "tiny.json").string()});
  EXPECT_EQ(r.code, kNumeric);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(Cli, ShippedConfigsParse) {
  for (const char* name : {"table1_reduced", "table2_reduced", "fig1_dvartheta", "fig2_da", "fig4_theta", "smoke"}) {
    std::ifstream in(std::string(EVBREAK_SOURCE_DIR) + "/configs/" + name + ".json");
    ASSERT_TRUE(in) << name;
  }
}

TEST(Sha256, KnownDigest) {
  const fs::path p = fs::temp_directory_path() / ("evbreak_sha_" + std::to_string(::getpid()));
  std::ofstream(p, std::ios::binary) << "abc";
  EXPECT_EQ(file_sha256(p.string()), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(p);
}

}  // namespace
}  // namespace evbreak::cli
