#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

using Json = nlohmann::ordered_json;

namespace {

const std::string kCli = SCORING_CLI_PATH;
const std::string kData = SCORING_TEST_DATA;

struct CliRun {
  int status;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

}  // namespace

TEST(Cli, RepairStandardCredence) {
  const CliRun r = run("repair --rule brier --credence " + kData + "/standard.json");
  ASSERT_EQ(r.status, 0) << r.out;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["p"][0].get<double>(), 0.5, 1e-9);
  EXPECT_NEAR(j["p"][1].get<double>(), 0.5, 1e-9);
  for (const auto& m : j["margins"]) EXPECT_NEAR(m.get<double>(), 0.02, 1e-9);

  const CliRun q = run("repair --method projection --credence " + kData + "/standard.json");
  ASSERT_EQ(q.status, 0);
  EXPECT_EQ(Json::parse(q.out)["method"], "projection");
}

TEST(Cli, GapOnTwoCircleIsAFinding) {
  const CliRun r = run("gap --rule two-circle --resolution 500");
  EXPECT_EQ(r.status, 2);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["max_gap"].get<double>(), 0.5, 0.05);
  EXPECT_NEAR(j["witness"][0].get<double>(), 1.20711, 0.01);
  EXPECT_NEAR(j["witness"][1].get<double>(), 1.20711, 0.01);
  EXPECT_TRUE(j["gap_found"].get<bool>());
  EXPECT_EQ(run("gap --rule brier --resolution 200").status, 0);
}

TEST(Cli, WitnessVerifies) {
  const CliRun r = run("witness --case bii --verify");
  EXPECT_EQ(r.status, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["summary"], "VERIFIED");
  EXPECT_NEAR(j["fill"][0].get<double>(), 1.15711, 1e-5);

  const CliRun b = run("witness --case bi --verify --verify-k 500");
  EXPECT_EQ(b.status, 0);
  EXPECT_EQ(Json::parse(b.out)["fill"][1], "-inf");
}

TEST(Cli, ScoreAndVerify) {
  const CliRun s = run("score --rule brier --credence " + kData + "/uniform.json");
  ASSERT_EQ(s.status, 0);
  const Json j = Json::parse(s.out);
  EXPECT_TRUE(j["coherent"].get<bool>());
  EXPECT_NEAR(j["score"][0].get<double>(), -0.5, 1e-12);

  EXPECT_EQ(run("verify --rule brier --resolution 20 --check propriety").status, 0);
  EXPECT_EQ(run("verify --rule negated:base=brier --resolution 20 --check propriety").status, 2);
  EXPECT_EQ(run("verify --rule two-circle --resolution 200 --check condition-b").status, 2);
}

TEST(Cli, Deterministic) {
  for (const std::string& args : std::vector<std::string>{"verify --rule log -n 3 --resolution 12 --check propriety",
                                 "repair --rule brier --credence " + kData + "/batch/b.json",
                                 "figure --resolution 100"}) {
    const CliRun a = run(args);
    const CliRun b = run(args);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, JsonRoundTrip) {
  for (const std::string& args : std::vector<std::string>{"score --rule spherical --credence " + kData + "/standard.json",
                                 "verify --rule brier --resolution 20",
                                 "repair --rule brier --credence-dir " + kData + "/batch",
                                 "gap --rule two-circle --resolution 100 --faces",
                                 "witness --case bi"}) {
    const CliRun r = run(args);
    ASSERT_FALSE(r.out.empty()) << args;
    EXPECT_EQ(Json::parse(r.out).dump(2) + "\n", r.out) << args;
  }
}

TEST(Cli, Errors) {
  CliRun r = run("score --rule quadratic --credence " + kData + "/standard.json");
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(Json::parse(r.out)["error"], "BadSpec");
  r = run("score --rule two-circle --credence " + kData + "/standard.json");
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(Json::parse(r.out)["error"], "DomainViolation");
  r = run("repair --rule brier --credence " + kData + "/uniform.json");
  EXPECT_EQ(Json::parse(r.out)["error"], "Coherent");
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(run("score --rule brier --credence " + kData + "/missing_mask.json").status, 1);
  EXPECT_EQ(run("witness --case bii --rule brier").status, 1);
  EXPECT_EQ(run("nonsense").status, 1);
}

TEST(Cli, FigureCsv) {
  const CliRun r = run("figure --resolution 200");
  ASSERT_EQ(r.status, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "role,x1,x2");
  std::map<std::string, int> roles;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    ++roles[line.substr(0, comma)];
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2) << line;
  }
  EXPECT_EQ(roles["F"], 201);
  EXPECT_EQ(roles["hull_edge"], 2);
  EXPECT_EQ(roles["witness"], 2);
  EXPECT_EQ(roles["normal"], 1);
}

TEST(Cli, BatchRepair) {
  const CliRun r = run("repair --rule brier --credence-dir " + kData + "/batch");
  EXPECT_EQ(r.status, 0) << r.out;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["repaired"], 2);
  EXPECT_EQ(j["results"][0]["file"], "a.json");
  for (const auto& item : j["results"]) {
    for (const auto& m : item["result"]["margins"]) EXPECT_GT(m.get<double>(), 0.0);
  }
}
