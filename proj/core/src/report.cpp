#include "rdsio/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rdsio {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void Trace::add(std::size_t fiber_id, double t, const std::string& series, std::size_t component, double value) {
  rows_.push_back(TraceRow{fiber_id, t, series, component, value});
}

void Trace::add(std::size_t fiber_id, double t, const std::string& series, const Vec& values) {
  for (std::size_t i = 0; i < values.size(); ++i) add(fiber_id, t, series, i, values[i]);
}

void Trace::append(const Trace& other) { rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end()); }

void Trace::write_csv(std::ostream& os) const {
  std::vector<std::size_t> order(rows_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    if (rows_[a].fiber_id != rows_[b].fiber_id) return rows_[a].fiber_id < rows_[b].fiber_id;
    return rows_[a].t < rows_[b].t;
  });
  os << kHeaderComment << '\n' << kColumns << '\n';
  for (std::size_t k : order) {
    const TraceRow& r = rows_[k];
    os << r.fiber_id << ',' << format_double(r.t) << ',' << r.series << ',' << r.component << ','
       << format_double(r.value) << '\n';
  }
}

std::string Trace::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

void ConvergenceReport::finalize() {
  worst_residual = 0.0;
  worst_fiber = 0;
  passed = !fibers.empty();
  for (const auto& f : fibers) {
    if (!(f.final_residual <= worst_residual)) {
      worst_residual = f.final_residual;
      worst_fiber = f.fiber_id;
    }
    passed = passed && f.converged;
  }
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

nlohmann::json json_vec(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(json_number(x));
  return j;
}

void to_json(nlohmann::json& j, const TemperedReport& r) {
  j = nlohmann::json{{"gammas", json_vec(r.gammas)},
                     {"scores", json_vec(r.scores)},
                     {"growth_slope", json_number(r.growth_slope)},
                     {"max_norm", json_number(r.max_norm)},
                     {"tempered_consistent", r.tempered_consistent}};
}

void to_json(nlohmann::json& j, const FiberConvergence& r) {
  j = nlohmann::json{{"fiber_id", r.fiber_id},
                     {"limit", json_vec(r.limit)},
                     {"final_state", json_vec(r.final_state)},
                     {"final_residual", json_number(r.final_residual)},
                     {"decay_slope", json_number(r.decay_slope)},
                     {"converged", r.converged}};
}

void to_json(nlohmann::json& j, const ConvergenceReport& r) {
  j = nlohmann::json{{"label", r.label},
                     {"tol", json_number(r.tol)},
                     {"worst_residual", json_number(r.worst_residual)},
                     {"worst_fiber", r.worst_fiber},
                     {"passed", r.passed},
                     {"fibers", r.fibers},
                     {"notes", r.notes}};
  if (r.domination) j["domination"] = *r.domination;
}

}  // namespace rdsio
