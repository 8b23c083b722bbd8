#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "greenwalk/cli.hpp"
#include "greenwalk/config.hpp"
#include "greenwalk/errors.hpp"
#include "greenwalk/reports.hpp"

using namespace greenwalk;
using nlohmann::json;

namespace {

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json parse_error(const CliRun& r) {
  const json j = json::parse(r.err);
  REQUIRE(j.contains("error"));
  return j.at("error");
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream f(p, std::ios::trunc);
  f << body;
  return p;
}

} // namespace

TEST_CASE("run configurations round-trip through JSON") {
  RunConfig cfg;
  cfg.command = "drift";
  cfg.group = "freeprod:2,3";
  cfg.n = 123;
  cfg.seed = 99;
  cfg.tol = 0.5;
  cfg.format = "csv";
  const RunConfig back = RunConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.group == "freeprod:2,3");
  CHECK(back.n == 123);
  CHECK(back.seed == 99);

  CHECK_THROWS_AS(RunConfig::from_json(json{{"frobnicate", 1}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"n", "ten"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"group", 7}}), ConfigError);
  CHECK_NOTHROW(RunConfig::from_json(json{{"command", "drift"}, {"n", 10}}));
}

TEST_CASE("configuration validation names the offending field") {
  const auto expect_reject = [](auto&& mutate) {
    RunConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  expect_reject([](RunConfig& c) { c.n = 0; });
  expect_reject([](RunConfig& c) { c.trajectories = 0; });
  expect_reject([](RunConfig& c) { c.depth = 0; });
  expect_reject([](RunConfig& c) { c.depth = 17; });
  expect_reject([](RunConfig& c) { c.truncation = 0; });
  expect_reject([](RunConfig& c) { c.truncation = 1000; });
  expect_reject([](RunConfig& c) { c.radius = 0; });
  expect_reject([](RunConfig& c) { c.radius = 99; });
  expect_reject([](RunConfig& c) { c.threads = -1; });
  expect_reject([](RunConfig& c) { c.format = "xml"; });
  expect_reject([](RunConfig& c) { c.tol = -1.0; });
  expect_reject([](RunConfig& c) { c.alpha = 0.0; });
  expect_reject([](RunConfig& c) { c.pair_radius = -2; });
  RunConfig ok;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("measure and metric builders enforce their domains") {
  const GroupSpec f2 = GroupSpec::parse("free:2");
  const GroupSpec fp = GroupSpec::parse("freeprod:2,3");
  CHECK(build_measure(f2, "uniform").size() == 4);
  CHECK(build_measure(f2, "biased").mass_of(parse_element(f2, "a")) ==
        doctest::Approx(0.375));
  CHECK_THROWS_AS(build_measure(fp, "biased"), ConfigError);
  CHECK_THROWS_AS(build_measure(f2, "a:0.5,a-:0.5"), ConfigError); // elementary
  CHECK_THROWS_AS(build_measure(f2, "a"), ConfigError);
  CHECK_THROWS_AS(build_measure(f2, "a:x"), ConfigError);
  CHECK(build_measure(f2, "a:1,a-:1,b:2,b-:2").size() == 4);

  const StepDistribution mu = build_measure(f2, "uniform");
  CHECK(build_metric(f2, mu, "word").kind == MetricKind::word);
  CHECK(build_metric(f2, mu, "green").kind == MetricKind::green);
  CHECK_THROWS_AS(build_metric(f2, mu, "hyperbolic"), ConfigError);
  const GroupSpec lamp = GroupSpec::parse("zwrz");
  CHECK_THROWS_AS(
      build_metric(lamp, uniform_generator_measure(lamp), "green"),
      CapabilityError);
}

TEST_CASE("CLI exit codes distinguish config, capability and accuracy failures") {
  const CliRun bad_group = run({"green", "--group", "nonsense"});
  CHECK(bad_group.exit_code == 3);
  const json e1 = parse_error(bad_group);
  CHECK(e1.at("kind") == "config");
  CHECK(e1.at("exit") == 3);
  CHECK(!e1.at("message").get<std::string>().empty());

  const CliRun too_big = run({"green", "--radius", "12"});
  CHECK(too_big.exit_code == 4);
  CHECK(parse_error(too_big).at("kind") == "resource");

  const CliRun too_sharp = run({"green", "--radius", "3", "--truncation", "30",
                                "--tol", "1e-12"});
  CHECK(too_sharp.exit_code == 4);
  CHECK(parse_error(too_sharp).at("kind") == "accuracy");

  const CliRun no_args = run({});
  CHECK(no_args.exit_code == 3);

  const CliRun lamp_green = run({"drift", "--group", "zwrz", "--metric", "green",
                                 "--n", "100", "--trajectories", "8"});
  CHECK(lamp_green.exit_code == 3);
  CHECK(parse_error(lamp_green).at("kind") == "capability");
}

TEST_CASE("a certification request that cannot hold reports findings and exits 2") {
  const CliRun r = run({"delta", "--metric", "green", "--radius", "2",
                        "--truncation", "60", "--tol", "1e-9"});
  CHECK(r.exit_code == 2);
  const json env = json::parse(r.out);
  REQUIRE(env.contains("findings"));
  CHECK(env.at("findings").size() >= 1);
  CHECK(env.at("payload").at("delta").get<double>() > 1e-9);
  CHECK_FALSE(env.at("payload").at("exact_zero").get<bool>());
}

TEST_CASE("a nonzero four-point constant on a free product is a result, not a finding") {
  const CliRun fp = run({"delta", "--group", "freeprod:3,4", "--radius", "3"});
  CHECK(fp.exit_code == 0);
  const json env = json::parse(fp.out);
  CHECK(env.at("findings").empty());
  CHECK(env.at("payload").at("delta").get<double>() == 1.0);

  const CliRun tree = run({"delta", "--group", "free:2", "--radius", "3"});
  CHECK(tree.exit_code == 0);
  const json tree_env = json::parse(tree.out);
  CHECK(tree_env.at("findings").empty());
  CHECK(tree_env.at("payload").at("exact_zero").get<bool>());
}

TEST_CASE("the Green report envelope is complete, accurate and byte-stable") {
  const std::vector<std::string> args = {"green", "--radius", "3", "--format", "json"};
  const CliRun r1 = run(args);
  const CliRun r2 = run(args);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out == r2.out); // bytes, not just values
  const json env = json::parse(r1.out);
  CHECK(env.at("tool") == "greenwalk");
  CHECK(env.at("schema") == 1);
  CHECK(env.at("command") == "green");
  CHECK(env.at("config").at("group") == "free:2");
  CHECK(env.at("findings").empty());
  CHECK(env.at("payload").at("gee").get<double>() ==
        doctest::Approx(1.5).epsilon(2e-3));
  CHECK(env.at("payload").at("quasi_isometry").contains("slope"));
}

TEST_CASE("CSV output carries one row per ball element") {
  const CliRun r = run({"green", "--radius", "2", "--format", "csv"});
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (count == 0) header_seen = line.find("element") != std::string::npos ||
                                  line.find("word") != std::string::npos;
    ++count;
  }
  CHECK(header_seen);
  CHECK(count == 1 + 17); // header plus the radius-2 ball
}

TEST_CASE("artifact directories receive the report and the table") {
  const auto dir = std::filesystem::temp_directory_path() / "greenwalk_test_artifacts";
  std::filesystem::remove_all(dir);
  const CliRun r = run({"green", "--radius", "2", "--out", dir.string()});
  REQUIRE(r.exit_code == 0);
  REQUIRE(std::filesystem::exists(dir / "report.json"));
  REQUIRE(std::filesystem::exists(dir / "green.csv"));
  std::ifstream f(dir / "report.json");
  json env;
  f >> env;
  CHECK(env.at("command") == "green");
  CHECK(env.at("payload").at("gee").get<double>() == doctest::Approx(1.5).epsilon(2e-3));
  std::filesystem::remove_all(dir);
}

TEST_CASE("config files merge under explicit flags") {
  const auto path = temp_file("greenwalk_cfg.json",
                              R"({"n": 123, "seed": 9, "trajectories": 64})");
  const CliRun r = run({"drift", "--config", path.string(), "--n", "500",
                        "--trajectories", "32"});
  REQUIRE(r.exit_code == 0);
  const json env = json::parse(r.out);
  CHECK(env.at("config").at("n") == 500);          // flag beats file
  CHECK(env.at("config").at("seed") == 9);         // file beats default
  CHECK(env.at("config").at("trajectories") == 32);
  std::filesystem::remove(path);

  const auto bad = temp_file("greenwalk_bad.json", "{oops");
  const CliRun rb = run({"drift", "--config", bad.string()});
  CHECK(rb.exit_code == 3);
  CHECK(parse_error(rb).at("message").get<std::string>().find("parse failure") !=
        std::string::npos);
  std::filesystem::remove(bad);

  const auto unknown = temp_file("greenwalk_unknown.json", R"({"walrus": 1})");
  const CliRun ru = run({"drift", "--config", unknown.string()});
  CHECK(ru.exit_code == 3);
  std::filesystem::remove(unknown);
}

TEST_CASE("selftest prints one line per check and stays green") {
  const CliRun r = run({"selftest"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("[PASS]") != std::string::npos);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
  CHECK(r.out.find("checks passed") != std::string::npos);
  // a second run prints identical bytes (no timings, no timestamps)
  const CliRun r2 = run({"selftest"});
  CHECK(r.out == r2.out);
}

TEST_CASE("help requests succeed and name the subcommands") {
  const CliRun r = run({"--help"});
  CHECK(r.exit_code == 0);
  for (const char* cmd : {"green", "hilbert", "boundary", "drift", "clt", "lil",
                          "lamplighter", "delta", "selftest"})
    CHECK(r.out.find(cmd) != std::string::npos);
}

TEST_CASE("the boundary command reports the spectral pipeline in one envelope") {
  const CliRun r = run({"boundary", "--depth", "3", "--measure", "biased"});
  REQUIRE(r.exit_code == 0);
  const json env = json::parse(r.out);
  const json& p = env.at("payload");
  CHECK(p.at("drift_formula").get<double>() > 0.0);
  CHECK(p.at("sigma2").get<double>() > 0.0);
  CHECK(p.at("tau_hat").get<double>() < 1.0);
  CHECK(p.at("poisson").at("residual").get<double>() <= 1e-8);
}

TEST_CASE("CSV rendering quotes exactly what needs quoting") {
  const std::string text = csv_text({"x", "note"}, {{"1", "plain"},
                                                    {"2", "with,comma"},
                                                    {"3", "with\"quote"}});
  CHECK(text == "x,note\n1,plain\n2,\"with,comma\"\n3,\"with\"\"quote\"\n");
  CHECK_THROWS_AS(csv_text({"x"}, {{"1", "2"}}), ConfigError);
  CHECK(csv_number(0.1) == "0.1");
  CHECK(csv_number(1.5) == "1.5");
  CHECK(csv_number(-0.25) == "-0.25");
}
