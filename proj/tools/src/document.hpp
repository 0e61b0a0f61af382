#pragma once

// YAML access with located diagnostics, and the model objects a scenario
// declares.

#include <functional>
#include <initializer_list>
#include <optional>
#include <string>

#include <yaml-cpp/yaml.h>

#include "rdsio_tools/scenario.hpp"

namespace rdsio::scenario::detail {

class Doc {
 public:
  explicit Doc(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const;
  /// Like fail, with the column moved `offset` characters into a scalar.
  [[noreturn]] void fail_in(const YAML::Node& at, std::size_t offset, const std::string& msg) const;

  /// Fresh default noise stream, in document order.
  std::uint64_t next_stream() { return ++streams_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::uint64_t streams_ = 0;
};

/// A mapping node whose keys are checked against an allow list.
class Map {
 public:
  Map(Doc& doc, const YAML::Node& node, std::string what);

  void allow(std::initializer_list<const char*> keys) const;
  bool has(const char* key) const;
  YAML::Node get(const char* key) const;  ///< required key
  const YAML::Node& node() const { return node_; }
  Doc& doc() const { return *doc_; }
  const std::string& what() const { return what_; }

  double number(const char* key) const;
  double number(const char* key, double fallback) const;
  std::size_t count(const char* key, std::size_t fallback) const;
  std::string text(const char* key) const;
  std::string text(const char* key, const std::string& fallback) const;
  bool flag(const char* key, bool fallback) const;

 private:
  Doc* doc_;
  YAML::Node node_;
  std::string what_;
};

double as_number(Doc& doc, const YAML::Node& n);
/// A number or a list of numbers.
Vec as_numbers(Doc& doc, const YAML::Node& n);

/// {constant: ...}, {uniform: ...}, {exponential: ...} or {discrete: ...},
/// each with an optional stream. `dim` of zero accepts any dimension.
RandomVariable parse_variable(Doc& doc, const YAML::Node& n, std::size_t dim);

struct SystemModel {
  SystemFlow flow;
  OutputMap output;
  std::optional<Generator> generator;
  std::optional<LinearCoeffs> linear;
};

SystemModel parse_system(Doc& doc, const YAML::Node& n, TimeKind time);

struct InputModel {
  std::string type;
  Process process;
  /// Generator of a stationary (or constant) input.
  std::optional<RandomVariable> base;
  /// Pullback limit of a converging input.
  std::optional<RandomVariable> limit;
};

InputModel parse_input(Doc& doc, const YAML::Node& n, std::size_t dim, TimeKind time);

struct Context {
  TimeKind time;
  SystemModel system;
  InputModel input;
};

using Runner = std::function<Outcome(std::uint64_t seed, std::size_t fibers)>;

/// Validates an experiment block and returns its runner.
Runner parse_experiment(Doc& doc, const YAML::Node& n, const Context& ctx, std::string& kind);

}  // namespace rdsio::scenario::detail
