#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <rdsio/rdsio.hpp>

namespace rdsio::scenario {

/// Malformed or invalid scenario text. Line and column are 1-based; zero
/// means unknown.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& source, int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// File missing, unreadable or unwritable.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Outcome {
  bool passed = false;
  nlohmann::json result;
  Trace trace;
};

/// A validated scenario. Everything is resolved at load time; `execute` only
/// computes.
struct Scenario {
  std::string name;
  std::string description;
  std::string source;
  std::string experiment;
  std::uint64_t seed = 1;
  TimeKind time = TimeKind::discrete;
  std::size_t fibers = 20;
  std::function<Outcome(std::uint64_t seed, std::size_t fibers)> execute;
};

Scenario parse_scenario(const std::string& text, const std::string& source);
/// Reads and parses a file; IoError when it cannot be read.
Scenario load_scenario_file(const std::string& path);

struct BundledScenario {
  std::string name;
  std::string text;
};

/// Scenarios compiled into the binary, sorted by name.
const std::vector<BundledScenario>& bundled_scenarios();
std::optional<Scenario> find_bundled(const std::string& name);

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string source;
};

/// Bundled scenarios followed by the *.yaml files of `dir`. A custom scenario
/// whose name is already taken is listed as "name@path".
std::vector<CatalogEntry> catalog(const std::optional<std::string>& dir);

struct RunOutput {
  bool passed = false;
  nlohmann::json report;
  std::string csv;
};

RunOutput run_scenario(const Scenario& s, std::optional<std::uint64_t> seed = std::nullopt,
                       std::optional<std::size_t> fibers = std::nullopt);

/// Writes <dir>/<name>.json and <dir>/<name>.csv, creating dir if needed.
void write_outputs(const RunOutput& out, const std::string& dir, const std::string& name);

}  // namespace rdsio::scenario
