#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmatch/error.hpp"
#include "cli.hpp"
#include "config.hpp"

using namespace bmatch;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(BMATCH_SOURCE_DIR) / "configs";

struct Out {
  int code;
  std::string out;
  std::string err;
};

Out call(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = cli::run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("bmatch_test_" + name);
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Config, RoundTrip) {
  for (const char* name : {"single_edge.json", "path2.json", "ring6.json"}) {
    const auto cfg = cli::load_config((kConfigs / name).string());
    EXPECT_EQ(cli::parse_config(cli::to_json(cfg)), cfg) << name;
  }
}

TEST(Config, IndicesAreOneBased) {
  const auto cfg = cli::load_config((kConfigs / "path2.json").string());
  EXPECT_EQ(cfg.graph.edges.front(), (Edge{0, 0}));
  ASSERT_TRUE(cfg.workload);
  EXPECT_EQ(*cfg.workload, DemandSet{0});
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto j = cli::to_json(cli::load_config((kConfigs / "single_edge.json").string()));
  j["sim"]["horizonn"] = 5;
  try {
    cli::parse_config(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
  j = cli::to_json(cli::load_config((kConfigs / "single_edge.json").string()));
  j["graph"]["edges"] = nlohmann::json::parse("[[0, 1]]");
  EXPECT_THROW(cli::parse_config(j), Error);
  j = cli::to_json(cli::load_config((kConfigs / "single_edge.json").string()));
  j["policy"]["kind"] = "fifo";
  EXPECT_THROW(cli::resolve(cli::parse_config(j)), Error);
}

TEST(Config, ResolveComputesThreshold) {
  const auto cfg = cli::load_config((kConfigs / "path2.json").string());
  const auto r = cli::resolve(cfg);
  ASSERT_TRUE(r.h);
  EXPECT_EQ(r.tau, r.h->tau_star);
}

TEST(Cli, HelpAndUsage) {
  auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"validate", "moments", "simulate", "sweep", "compare", "relaxation",
                          "oracle", "dump-h"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  EXPECT_EQ(call({"sweep", "--help"}).code, 0);
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"simulate", "--steps", "3", "x.json"}).code, 1);
}

TEST(Cli, MissingConfigFails) {
  const auto r = call({"simulate", "/nonexistent/bmatch.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, SimulateWritesCsv) {
  const auto r = call({"simulate", (kConfigs / "single_edge.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "label,tau,avg_cost,stderr,idleness_rate,mean_workload,max_buffer,T,seed");
  EXPECT_EQ(ls[1].substr(0, 11), "hmaxweight,");

  const auto out = fs::temp_directory_path() / "bmatch_test_sim.csv";
  fs::remove(out);
  ASSERT_EQ(call({"simulate", (kConfigs / "single_edge.json").string(), "--out", out.string()}).code, 0);
  std::ifstream f(out);
  std::stringstream s;
  s << f.rdbuf();
  EXPECT_EQ(s.str(), r.out);
}

TEST(Cli, ValidateReportsNCond) {
  auto r = call({"validate", (kConfigs / "path2.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ncond,satisfied"), std::string::npos);
  const auto bad = write_temp("bad.json", R"({
    "graph": {"demand": 2, "supply": 2, "edges": [[1, 1], [2, 1], [2, 2]]},
    "arrivals": {"pairs": [{"pair": [1, 1], "prob": 0.7}, {"pair": [2, 2], "prob": 0.3}]},
    "cost": [1, 1, 1, 1]
  })");
  r = call({"validate", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("ncond,violated"), std::string::npos);
  EXPECT_NE(r.out.find("ncond_witness,{d1}"), std::string::npos);
}

TEST(Cli, MomentsAndDump) {
  auto r = call({"moments", (kConfigs / "path2.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("delta,0.1\n"), std::string::npos);
  EXPECT_NE(r.out.find("tau_star,"), std::string::npos);
  r = call({"dump-h", (kConfigs / "path2.json").string(), "--points", "5", "--w-min", "-2",
            "--w-max", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 6u);
}

TEST(Cli, OracleExitCodes) {
  const auto big = write_temp("big.json", R"({
    "graph": {"demand": 3, "supply": 3,
              "edges": [[1, 1], [1, 2], [2, 2], [2, 3], [3, 3], [3, 1]]},
    "arrivals": {"pairs": [{"pair": [1, 1], "prob": 0.3}, {"pair": [2, 2], "prob": 0.3},
                           {"pair": [3, 3], "prob": 0.4}]},
    "cost": [1, 1, 1, 1, 1, 1],
    "oracle": {"cap": 40}
  })");
  EXPECT_EQ(call({"oracle", big.string()}).code, 2);
  const auto r = call({"oracle", (kConfigs / "single_edge.json").string(), "--cap", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
}

TEST(Cli, RelaxationRuns) {
  const auto r = call({"relaxation", (kConfigs / "path2.json").string(), "--sim", "--steps", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 4u);
  EXPECT_NE(call({"relaxation", (kConfigs / "path2.json").string(), "--sim", "--vi"}).code, 0);
}
