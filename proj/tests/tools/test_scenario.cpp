#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "rdsio_tools/scenario.hpp"

using namespace rdsio::scenario;

namespace {

const std::string kData = RDSIO_TEST_DATA;

ScenarioError parse_error(const std::string& text) {
  try {
    parse_scenario(text, "inline");
  } catch (const ScenarioError& e) {
    return e;
  }
  FAIL("expected a ScenarioError");
  return ScenarioError("", 0, 0, "");
}

const char* kMinimal = R"(name: minimal
time: discrete
fibers: 2
system:
  type: generator
  step: "0.5*x + u"
experiment:
  type: axioms
  samples: 20
)";

}  // namespace

TEST_CASE("bundled scenarios parse and have unique names") {
  std::set<std::string> names;
  for (const auto& b : bundled_scenarios()) {
    const Scenario s = parse_scenario(b.text, b.name);
    CHECK(s.name == b.name);
    CHECK_FALSE(s.description.empty());
    names.insert(s.name);
  }
  CHECK(names.size() == bundled_scenarios().size());
  CHECK(names.size() >= 8);
  CHECK(find_bundled("linear_characteristic").has_value());
  CHECK_FALSE(find_bundled("no_such_scenario").has_value());
}

TEST_CASE("yaml syntax errors carry line and column") {
  const ScenarioError e = parse_error("name: x\ntime: [discrete\n");
  CHECK(e.line() >= 2);
  CHECK(e.column() > 0);
}

TEST_CASE("expression errors point into the expression") {
  const ScenarioError e = parse_error(
      "name: x\ntime: discrete\nsystem:\n  type: generator\n  step: \"0.5*x + y\"\nexperiment: {type: axioms}\n");
  CHECK(e.line() == 5);
  CHECK(e.column() == 18);
  const ScenarioError plain = parse_error(
      "name: x\ntime: discrete\nsystem:\n  type: generator\n  step: 0.5*x + y\nexperiment: {type: axioms}\n");
  CHECK(plain.column() == 17);
}

TEST_CASE("validation errors") {
  SUBCASE("unknown key") {
    const ScenarioError e = parse_error(std::string(kMinimal) + "colour: blue\n");
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
    CHECK(e.line() == 10);
  }
  SUBCASE("generator in continuous time") {
    std::string t = kMinimal;
    t.replace(t.find("discrete"), 8, "continuous");
    CHECK(parse_error(t).line() == 5);
  }
  SUBCASE("wrong number of step expressions") {
    std::string t = kMinimal;
    t.replace(t.find("system:"), 7, "system:\n  state_dim: 2");
    CHECK(std::string(parse_error(t).what()).find("expected 2") != std::string::npos);
  }
  SUBCASE("linear coefficients must be cell constant and scalar") {
    parse_error("name: x\ntime: continuous\nsystem: {type: linear, a: [1, 2], b: 1}\nexperiment: {type: axioms}\n");
  }
  SUBCASE("missing experiment") {
    const ScenarioError e = parse_error("name: x\ntime: discrete\nsystem: {type: generator, step: x}\n");
    CHECK(std::string(e.what()).find("experiment") != std::string::npos);
  }
  SUBCASE("experiment needs a linear system") {
    parse_error("name: x\ntime: discrete\nsystem: {type: generator, step: x}\nexperiment: {type: decay, lambda: 1}\n");
  }
  SUBCASE("bad law") {
    parse_error(
        "name: x\ntime: discrete\nsystem: {type: generator, step: x + n, noise: {n: {uniform: [1, -1]}}}\n"
        "experiment: {type: axioms}\n");
  }
}

TEST_CASE("runs are deterministic and seed-dependent") {
  const Scenario s = parse_scenario(kMinimal, "inline");
  const RunOutput a = run_scenario(s);
  const RunOutput b = run_scenario(s);
  CHECK(a.passed);
  CHECK(a.csv == b.csv);
  CHECK(a.report == b.report);
  CHECK(a.csv.rfind("# rdsio-trace v1\nfiber_id,t,series,component,value\n", 0) == 0);
  const RunOutput other = run_scenario(s, 99, 3);
  CHECK(other.csv != a.csv);
  CHECK(other.report["fibers"] == 3);
}

TEST_CASE("planted identity fault fails and names the axiom") {
  const RunOutput out = run_scenario(load_scenario_file(kData + "/planted_identity_fault.yaml"));
  CHECK_FALSE(out.passed);
  const auto& failed = out.report["result"]["failed"];
  CHECK(std::find(failed.begin(), failed.end(), "I3") != failed.end());
  CHECK(out.report["result"]["axioms"][0]["max_violation"] == 1.0);
}

TEST_CASE("catalog") {
  const auto bundled = catalog(std::nullopt);
  CHECK(bundled.size() == bundled_scenarios().size());
  CHECK(catalog(kData + "/empty").size() == bundled.size());
  const auto with_dup = catalog(kData + "/custom");
  REQUIRE(with_dup.size() == bundled.size() + 1);
  CHECK(with_dup.back().name.rfind("generator_axioms@", 0) == 0);
  CHECK_THROWS_AS(catalog(kData + "/missing"), IoError);
  CHECK_THROWS_AS(load_scenario_file(kData + "/missing.yaml"), IoError);
}
