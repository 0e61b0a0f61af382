#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdsio/axioms.hpp"
#include "rdsio/report.hpp"
#include "rdsio/system.hpp"

namespace rdsio {

/// A partial order on R^n.
class Order {
 public:
  virtual ~Order() = default;
  virtual std::size_t dim() const = 0;
  virtual bool leq(const Vec& a, const Vec& b) const = 0;
  /// Signed slack of a <= b; negative exactly when the relation fails.
  virtual double margin(const Vec& a, const Vec& b) const = 0;
};

/// Componentwise order induced by the positive orthant.
class OrthantOrder final : public Order {
 public:
  explicit OrthantOrder(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  bool leq(const Vec& a, const Vec& b) const override;
  double margin(const Vec& a, const Vec& b) const override;

 private:
  std::size_t dim_;
};

struct MonotoneOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 5;
  double t_max = 10.0;
  /// Lower states are drawn from this box (default [-1, 1]^n).
  Box state_box;
  double input_amplitude = 1.0;
  /// Nonzero gaps between ordered states or inputs are drawn from [min_gap, 1].
  double min_gap = 0.1;
};

struct MonotoneReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_margin = INFINITY;
  std::string worst_case;
  bool passed = false;
};

/// Samples x <= z and u <= v and checks phi(t, w, x, u) <= phi(t, w, z, v).
MonotoneReport check_monotone(const SystemFlow& sys, const Order& order, const MonotoneOptions& opts = {});

/// Coordinatewise envelopes of the pullback of u over t >= tau.
struct BracketPair {
  RandomVariable a_tau;
  RandomVariable b_tau;
  double tau = 0.0;
};

/// a_tau(w) = inf u_t(theta_{-t} w) and b_tau(w) = sup u_t(theta_{-t} w) over
/// the grid of multiples of `step` in [tau, horizon]. A known pullback limit,
/// when given, is included in the inf and sup. Evaluation throws
/// NonFiniteError on non-finite samples.
BracketPair brackets(const Process& u, double tau, double horizon, double step,
                     const std::optional<RandomVariable>& limit = std::nullopt);

/// Grid used by `brackets`: multiples of step in [tau, horizon].
std::vector<double> bracket_grid(double tau, double horizon, double step);

struct SandwichReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Pairs tau1 < tau2 where a decreased or b increased.
  std::size_t monotonicity_violations = 0;
  bool passed = false;
};

/// Checks a_tau(theta_t w) <= u_t(w) <= b_tau(theta_t w) for grid t >= tau and
/// the monotonicity of the envelopes across the given taus.
SandwichReport check_brackets(const Process& u, const std::vector<double>& taus, double horizon, double step,
                              const std::vector<Fiber>& fibers,
                              const std::optional<RandomVariable>& limit = std::nullopt);

struct CicsOptions {
  std::vector<double> schedule;  ///< pullback times; the last one is final
  double tol = 1e-4;
  std::string label = "cics";
  /// Orbit window for the growth diagnostic of the dominating residual.
  TemperedOptions domination{{0.05, 0.1, 0.5}, 20.0, 1.0};
};

/// Pullback trajectories from every initial state converge to the
/// characteristic value `k_limit` = K(u_inf) at the final scheduled time.
ConvergenceReport cics_experiment(const SystemFlow& sys, const RandomVariable& k_limit, const Process& u,
                                  const std::vector<RandomVariable>& initial_states,
                                  const std::vector<Fiber>& fibers, const CicsOptions& opts);

void to_json(nlohmann::json& j, const MonotoneReport& r);
void to_json(nlohmann::json& j, const SandwichReport& r);

}  // namespace rdsio
