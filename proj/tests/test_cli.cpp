#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result lab(const std::string& args) {
  const std::string cmd = std::string(LOCALITY_LAB_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json report(const std::string& args) {
  auto r = lab(args);
  EXPECT_EQ(r.code, 0) << args << "\n" << r.out;
  return nlohmann::json::parse(r.out);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("locality_lab_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, LocalizeCycle64) {
  auto j = report("localize --graph cycle:64 --alg coloring3 --trials 100 --seed 7");
  EXPECT_EQ(j["n"], 64);
  EXPECT_EQ(j["N"], 16777216u);
  EXPECT_EQ(j["runs"], 100);
  EXPECT_EQ(j["valid-solutions"].get<int>() + j["failed-runs"].get<int>(), 100);
  EXPECT_EQ(j["certificates"]["checked"], j["certificates"]["passed"]);
  EXPECT_LE(j["failure-rate"].get<double>(), 1.0);
  EXPECT_TRUE(j.contains("per-run-bound"));
  EXPECT_TRUE(j["seed-bits"].contains("total-bits"));
  EXPECT_TRUE(j.contains("config-hash"));
}

TEST(Cli, LowerboundNineCycle) {
  auto j = report("lowerbound --base cycle:9 --t 2 --mode exact");
  EXPECT_TRUE(j["all-equal"].get<bool>());
  ASSERT_FALSE(j["trees"].empty());
  for (const auto& tree : j["trees"]) {
    ASSERT_EQ(tree["queries"].size(), 18u) << tree.dump();
    for (const auto& q : tree["queries"]) EXPECT_EQ(q["verdict"], "equal");
  }
  EXPECT_EQ(j["gap"]["alpha-a"], 8);
  EXPECT_EQ(j["gap"]["alpha-b"], 9);
}

TEST(Cli, TriangleWalkWitness) {
  auto j = report("lowerbound --base cycle:3 --t 3 --tree triangle-walk --mode exact");
  EXPECT_FALSE(j["all-equal"].get<bool>());
}

TEST(Cli, SameConfigSameBytes) {
  const char* runs[] = {
      "localize --graph cycle:16 --alg coloring3 --trials 20 --seed 3",
      "estimate-failure --graph cycle:10 --alg random-prober --N 10000 --trials 200 --h empty --family kwise --seed 4",
      "two-path-gap --n-values 10,20 --trials 20 --seed 5",
      "gen-graph --graph random-regular:12:3:9",
  };
  for (const char* args : runs) {
    auto a = lab(args);
    auto b = lab(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
  const std::string args = "estimate-failure --graph cycle:10 --alg remote-prober --t 2 --N 1000 --trials 300 --seed 8";
  auto a = lab(args);
  auto b = lab(args);
  const std::string one = "LOCALITY_LAB_THREADS=1 ";
  FILE* pipe = popen((one + LOCALITY_LAB_PATH + " " + args).c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  pclose(pipe);
  EXPECT_EQ(a.out, out);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OutPrefixWritesJsonAndCsv) {
  const auto prefix = scratch("lca");
  auto r = lab("run-lca --graph cycle:6 --alg mis --out " + prefix.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(prefix.string() + ".json"), r.out);
  const std::string csv = slurp(prefix.string() + ".csv");
  EXPECT_FALSE(csv.empty());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);  // header + one row per vertex
}

TEST(Cli, ConfigFileAndFlagOverride) {
  const auto path = scratch("cfg.json");
  std::ofstream(path) << R"({"command": "run-partree", "graph": "cycle:5", "alg": "degree"})";
  auto j = report("run-partree --config " + path.string());
  EXPECT_EQ(j["labels"], nlohmann::json::array({2, 2, 2, 2, 2}));
  auto k = report("run-partree --config " + path.string() + " --graph path:3");
  EXPECT_EQ(k["labels"], nlohmann::json::array({1, 2, 1}));
  EXPECT_NE(j["config-hash"], k["config-hash"]);
}

TEST(Cli, SchemaErrorsExitOne) {
  const char* bad[] = {
      "",
      "bogus",
      "localize --graph cycle:8 --alg nope",
      "localize --graph cycle:8 --trials x",
      "run-lca --graph cycle:8",
      "run-lca --graph wheel:8 --alg mis",
      "run-lca --graph cycle:8 --alg mis --config /nonexistent/cfg.json",
  };
  for (const char* args : bad) {
    auto r = lab(args);
    EXPECT_EQ(r.code, 1) << args << "\n" << r.out;
    auto j = nlohmann::json::parse(r.out, nullptr, false);
    ASSERT_FALSE(j.is_discarded()) << args;
    EXPECT_TRUE(j.contains("error")) << args;
  }
}

TEST(Cli, GuardsExitTwo) {
  const char* guarded[] = {
      "derandomize-search --alg degree --n 2 --N 9 --t 1",
      "localize --graph cycle:200000 --alg coloring3",
      "lowerbound --base cycle:13 --t 2 --mode exact",
  };
  for (const char* args : guarded) {
    auto r = lab(args);
    EXPECT_EQ(r.code, 2) << args << "\n" << r.out;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["error"]["kind"], "scale-guard") << args;
  }
}

TEST(Cli, EveryCommandRuns) {
  const char* runs[] = {
      "gen-graph --graph cycle:5",
      "run-local --graph cycle:6 --alg coloring3-local",
      "run-lca --graph cycle:6 --alg mis",
      "run-partree --graph cycle:6 --alg degree",
      "localize --graph cycle:8 --alg coloring3 --trials 2",
      "estimate-failure --graph cycle:10 --alg random-prober --N 10000 --trials 10 --h empty",
      "derandomize-search --alg degree --n 2 --N 6 --t 1",
      "lowerbound --base cycle:5 --t 1 --mode exact",
      "perm-test --N 8 --k 2 --family kwise --eps 0.05",
      "two-path-gap --n-values 10,20 --trials 5",
  };
  for (const char* args : runs) {
    auto j = report(args);
    EXPECT_TRUE(j.contains("config-hash")) << args;
    EXPECT_TRUE(j.contains("seed-bits")) << args;
  }
}

TEST(Cli, GraphFileRoundTrip) {
  const auto prefix = scratch("rr");
  auto gen = lab("gen-graph --graph random-regular:10:3:4 --out " + prefix.string());
  ASSERT_EQ(gen.code, 0);
  const std::string file = prefix.string() + ".graph";
  EXPECT_EQ(slurp(file).rfind("n 10 delta 3\n", 0), 0u);
  auto a = report("run-lca --graph random-regular:10:3:4 --alg mis --delta 3");
  auto b = report("run-lca --graph file:" + file + " --alg mis --delta 3");
  EXPECT_EQ(a["labels"], b["labels"]);
  EXPECT_EQ(lab("run-lca --graph file:/nonexistent.graph --alg mis").code, 1);
}
