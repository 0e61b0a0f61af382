#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdsio/tempered.hpp"

namespace rdsio {

struct TraceRow {
  std::size_t fiber_id = 0;
  double t = 0.0;
  std::string series;
  std::size_t component = 0;
  double value = 0.0;
};

/// Long-format trace table written as CSV with a versioned header comment.
class Trace {
 public:
  static constexpr const char* kHeaderComment = "# rdsio-trace v1";
  static constexpr const char* kColumns = "fiber_id,t,series,component,value";

  void add(std::size_t fiber_id, double t, const std::string& series, std::size_t component, double value);
  void add(std::size_t fiber_id, double t, const std::string& series, const Vec& values);
  void append(const Trace& other);

  const std::vector<TraceRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// Rows sorted by (fiber_id, t), insertion order kept among ties. Numbers are
  /// printed with 17 significant digits so output is byte-reproducible.
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;

 private:
  std::vector<TraceRow> rows_;
};

struct FiberConvergence {
  std::size_t fiber_id = 0;
  Vec limit;
  Vec final_state;
  double final_residual = 0.0;
  /// Least-squares slope of log residual against t; NaN when not fitted.
  double decay_slope = 0.0;
  bool converged = false;
};

/// Outcome of a convergence experiment over a set of fibers.
struct ConvergenceReport {
  std::string label;
  double tol = 0.0;
  std::vector<FiberConvergence> fibers;
  double worst_residual = 0.0;
  std::size_t worst_fiber = 0;
  bool passed = false;
  /// Growth diagnostic of the dominating residual variable.
  std::optional<TemperedReport> domination;
  std::vector<std::string> notes;
  Trace trace;

  /// Recomputes worst_residual, worst_fiber and passed from `fibers`.
  void finalize();
};

void to_json(nlohmann::json& j, const TemperedReport& r);
void to_json(nlohmann::json& j, const FiberConvergence& r);
void to_json(nlohmann::json& j, const ConvergenceReport& r);

/// JSON-safe number: non-finite values become strings.
nlohmann::json json_number(double x);
nlohmann::json json_vec(const Vec& v);

}  // namespace rdsio
