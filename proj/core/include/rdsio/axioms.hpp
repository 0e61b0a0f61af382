#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rdsio/report.hpp"
#include "rdsio/system.hpp"

namespace rdsio {

/// Produces random test inputs; must be deterministic in the sampler state.
using InputSampler = std::function<Process(Sampler&)>;

/// Mix of constant, stationary cell-noise, exponentially decaying and
/// concatenated inputs with coordinates in [-amplitude, amplitude].
InputSampler default_input_sampler(std::size_t dim, TimeKind kind, double amplitude = 1.0);

struct AxiomOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  /// Splice points s and durations t are drawn from [0, t_max].
  double t_max = 30.0;
  /// Initial states; defaults to [-1, 1]^n when left empty.
  Box state_box;
  InputSampler input_sampler;
  /// Negative selects the default: exact for discrete time, 1e-9 relative
  /// (floored at magnitude one) for continuous time.
  double tolerance = -1.0;
};

struct AxiomResult {
  std::string name;
  double max_violation = 0.0;
  std::size_t violations = 0;
  std::size_t checked = 0;
  std::string worst_case;
  bool passed = true;
};

struct AxiomReport {
  double tolerance = 0.0;
  AxiomResult identity;     ///< (I3) phi(0, w, x, u) = x
  AxiomResult splice;       ///< (I4) cocycle property with concatenated inputs
  AxiomResult causality;    ///< (I5) dependence on the input only through [0, t)

  bool passed() const { return identity.passed && splice.passed && causality.passed; }
  std::vector<std::string> failed() const;
};

/// Samples (s, t, w, x, u, v) and reports the worst violation of each axiom.
/// Violations are reported, never thrown.
AxiomReport check_axioms(const SystemFlow& sys, const AxiomOptions& opts);

void to_json(nlohmann::json& j, const AxiomResult& r);
void to_json(nlohmann::json& j, const AxiomReport& r);

}  // namespace rdsio
