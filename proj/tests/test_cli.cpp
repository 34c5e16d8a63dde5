#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankcg/cli.hpp"
#include "rankcg/io.hpp"
#include "support.hpp"

using namespace rankcg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  io::json result;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rankcg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  Run r{code, nullptr, out.str(), err.str()};
  const auto eol = r.out.find('\n');
  if (code == 0 || code == 4) r.result = io::json::parse(r.out.substr(0, eol));
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rankcg_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("generate writes the instance directory") {
  const auto dir = scratch("generate");
  const auto r = invoke({"generate", "--family", "single_random", "--p1", "0.5", "--k", "10",
                         "--periods", "30", "--seed", "1", "-o", (dir / "inst").string()});
  REQUIRE(r.code == 0);
  CHECK(r.result["files"].size() == 5);
  for (const char* f : {"header.json", "train.jsonl", "test.jsonl", "ground_truth.json",
                        "revenues.json"})
    CHECK(fs::exists(dir / "inst" / f));
  CHECK(r.result["train"] == 300);
  fs::remove_all(dir);
}

TEST_CASE("price engines agree on small instances") {
  const auto dir = scratch("price");
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing::random_pricing_instance(rng, {});
    const auto path = dir / ("p" + std::to_string(trial) + ".json");
    io::write_json_file(path, io::to_json(inst));
    const auto dp = invoke({"price", "-i", path.string(), "--engine", "dp"});
    const auto bf = invoke({"price", "-i", path.string(), "--engine", "oracle"});
    REQUIRE(dp.code == 0);
    REQUIRE(bf.code == 0);
    CHECK(dp.result["profit"].get<double>() ==
          doctest::Approx(bf.result["profit"].get<double>()).epsilon(1e-9));
  }
  fs::remove_all(dir);
}

TEST_CASE("estimate and evaluate are repeatable") {
  const auto dir = scratch("estimate");
  const auto inst = (dir / "inst").string();
  REQUIRE(invoke({"generate", "--family", "multipurchase_rankedlist", "--n", "6", "--k", "5",
                  "--eta-max", "2", "--periods", "5", "--seed", "4", "--relaxed", "-o", inst})
              .code == 0);
  std::vector<double> srmse;
  for (const char* master : {"l1", "em", "l1", "em"}) {
    const auto model = (dir / (std::string(master) + ".json")).string();
    const auto est = invoke({"estimate", "-i", inst, "--master", master, "--eta-max", "2",
                             "-o", model});
    REQUIRE(est.code == 0);
    const auto ev = invoke({"evaluate", "--model", model, "-i", inst});
    REQUIRE(ev.code == 0);
    CHECK_FALSE(ev.result["hrmse"].is_null());
    srmse.push_back(ev.result["srmse"].get<double>());
  }
  CHECK(srmse[0] == srmse[2]);
  CHECK(srmse[1] == srmse[3]);

  const auto as = invoke({"assort", "--model", (dir / "l1.json").string(), "-i", inst});
  REQUIRE(as.code == 0);
  CHECK(as.result["aao"].get<double>() >= 0.0);
  CHECK(as.result["aao"].get<double>() <= 1.0 + 1e-12);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"price", "--engine", "dp"}).code == 2);
  CHECK(invoke({"price", "-i", (dir / "missing.json").string()}).code == 3);
  CHECK(invoke({"generate", "--family", "nonsense", "-o", (dir / "x").string()}).code == 2);
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{\"n\": 3, \"transactions\": [{\"offer\": [1], \"bundle\": [2], \"mu\": 1}]}";
  }
  CHECK(invoke({"price", "-i", (dir / "bad.json").string()}).code == 3);

  const auto inst = (dir / "inst").string();
  REQUIRE(invoke({"generate", "--seed", "2", "-o", inst}).code == 0);
  const auto r = invoke({"estimate", "-i", inst, "--time-limit", "0", "-o",
                         (dir / "m.json").string()});
  CHECK(r.code == 4);
  CHECK(r.result["report"]["termination_reason"] == "time_limit");
  CHECK(invoke({"estimate", "-i", inst, "--heuristic", "maybe"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("simulate and bench") {
  const auto dir = scratch("bench");
  REQUIRE(invoke({"generate", "--seed", "5", "-o", (dir / "set" / "a").string()}).code == 0);
  REQUIRE(invoke({"generate", "--family", "multipurchase_probit", "--n", "5", "--transactions",
                  "500", "--relaxed", "-o", (dir / "probit").string()})
              .code == 0);
  const auto pop = (dir / "pop.jsonl").string();
  const auto s1 = invoke({"simulate", "-i", (dir / "probit").string(), "--offer", "1,2,3",
                          "--consumers", "500", "--write-population", pop});
  REQUIRE(s1.code == 0);
  const auto s2 = invoke({"simulate", "-i", (dir / "probit").string(), "--population", pop,
                          "--offer", "1,2,3"});
  REQUIRE(s2.code == 0);
  CHECK(s1.result["mean"] == s2.result["mean"]);

  const auto csv = (dir / "out.csv").string();
  const auto b = invoke({"bench", "--dir", (dir / "set").string(), "--engines", "l1,em",
                         "--csv", csv});
  REQUIRE(b.code == 0);
  std::ifstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "instance,engine,wall_s,objective,columns,termination");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
  CHECK_FALSE(b.result["engines"]["l1"]["sgm_wall_s"].is_null());
  fs::remove_all(dir);
}
