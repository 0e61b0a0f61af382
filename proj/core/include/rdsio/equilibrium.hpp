#pragma once

#include <optional>
#include <vector>

#include "rdsio/report.hpp"
#include "rdsio/system.hpp"

namespace rdsio {

/// A random state x together with the stationary input it is claimed to be an
/// equilibrium for. No input means the system is input-free.
struct EquilibriumCandidate {
  RandomVariable state;
  std::optional<RandomVariable> input;
};

struct EquilibriumReport {
  double max_residual = 0.0;
  Fiber worst_fiber;
  double worst_t = 0.0;
  double tol = 0.0;
  std::size_t checked = 0;
  bool passed = false;
};

/// max over times x fibers of |phi(t, theta_{-t} w, x(theta_{-t} w), u) - x(w)|
/// where u is the stationary process of the candidate input.
EquilibriumReport check_equilibrium(const SystemFlow& sys, const EquilibriumCandidate& cand,
                                    const std::vector<double>& times, const std::vector<Fiber>& fibers, double tol);

struct EstimateOptions {
  double horizon = 30.0;
  double tol = 1e-9;
  /// Spacing of the pullback samples used for the Cauchy tail and the trace.
  double step = 1.0;
  /// The estimate is re-checked as an equilibrium on [0, equilibrium_span].
  double equilibrium_span = 10.0;
};

struct CharacteristicEstimate {
  /// w -> phi(T, theta_{-T} w, x0(theta_{-T} w), u).
  RandomVariable estimate;
  /// One entry per fiber: limit = value at T, final_residual = Cauchy tail
  /// max_{t in [T/2, T]} |xi^_t - xi^_T|.
  ConvergenceReport report;
  /// Equilibrium check of the estimate at 10 x tol on the converged fibers.
  EquilibriumReport equilibrium;
};

/// Pullback-limit estimate of the input-to-state characteristic K(u).
CharacteristicEstimate estimate_characteristic(const SystemFlow& sys, const RandomVariable& u,
                                               const RandomVariable& x0, const std::vector<Fiber>& fibers,
                                               const EstimateOptions& opts = {});

void to_json(nlohmann::json& j, const EquilibriumReport& r);

}  // namespace rdsio
