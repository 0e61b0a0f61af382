#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rdsio/report.hpp"
#include "rdsio/system.hpp"

namespace rdsio {

/// Coefficients of the scalar random linear equation
///   xi' = a(theta_t w) xi + b(theta_t w) u_t(w).
/// a and b must be scalar and constant on noise cells.
struct LinearCoeffs {
  RandomVariable a;
  RandomVariable b;
  std::optional<double> lambda_hint;
};

/// Throws unless a and b are scalar cell-constant variables and the hint, if
/// any, is positive.
void validate(const LinearCoeffs& c);

/// (e^{a w} - 1) / a, with the series w + a w^2 / 2 when |a| < 1e-8.
double expm1_ratio(double a, double w);

/// Exact flow: x e^{int_0^t a} + int_0^t b u e^{int_s^t a} ds. The interval is
/// cut at orbit cell boundaries and at the input's break points; each piece is
/// integrated in closed form when u is cell-constant and with 10-point
/// Gauss-Legendre otherwise.
double solve(const LinearCoeffs& c, double t, const Fiber& w, double x, const Process& u);

SystemFlow linear_system(const LinearCoeffs& c, std::string name = "linear");

struct CharacteristicValue {
  double value = 0.0;
  /// Truncation point T: the integral is taken over [-T, 0].
  double truncation = 0.0;
  /// Bound on the neglected tail; rigorous only when `certified`.
  double tail_bound = 0.0;
  double lambda = 0.0;
  /// True when sup a < 0 and b, u have finite known ranges, so the tail bound
  /// e^{int_{-T}^0 a} sup|b| sup|u| / (-sup a) is a proof.
  bool certified = false;
};

struct CharacteristicOptions {
  double tol = 1e-12;
  /// Backward marching stops here even if the tail bound is not met.
  double max_truncation = 1e5;
  /// Cells used for the empirical mean of a when lambda is estimated.
  std::size_t mean_window = 1000;
};

/// K(u)(w) = int_{-inf}^0 b(theta_s w) u(theta_s w) e^{int_s^0 a(theta_r w) dr} ds,
/// marched backward cell by cell until the tail bound is at most tol.
/// Throws Error when the decay rate lambda is not positive.
CharacteristicValue characteristic(const LinearCoeffs& c, const RandomVariable& u, const Fiber& w,
                                   const CharacteristicOptions& opts = {});

/// K(u) as a random variable.
RandomVariable characteristic_rv(const LinearCoeffs& c, const RandomVariable& u,
                                 const CharacteristicOptions& opts = {});

struct L2Options {
  /// Window of base points s in [-horizon, horizon].
  double horizon = 200.0;
  /// The supremum over r is taken on [0, reach].
  std::size_t reach = 2000;
  std::vector<double> gammas{0.05, 0.1, 0.5};
};

struct L2Fiber {
  double gamma_max = 0.0;
  /// Base points where the exponent still rises on the far half of [0, reach].
  std::size_t unsettled = 0;
  TemperedReport gamma_growth;
  bool passed = false;
};

/// Diagnostic for e^{int_s^{s+r} a} <= gamma(theta_s w) e^{-lambda r}: the
/// minimal gamma is computed on cell endpoints and checked for temperedness.
struct L2Report {
  double lambda = 0.0;
  double mean_a = 0.0;
  std::vector<L2Fiber> fibers;
  std::size_t failed_fibers = 0;
  bool passed = false;
};

L2Report check_L2(const LinearCoeffs& c, double lambda, const std::vector<Fiber>& fibers,
                  const L2Options& opts = {});

struct BoundedFlowOptions {
  std::size_t samples_per_fiber = 20;
  double state_bound = 1.0;
  double input_bound = 1.0;
  double step = 0.5;
  std::uint64_t seed = 3;
};

struct BoundedFlowReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Largest |phi| - bound seen (negative when every sample is inside).
  double worst_excess = -INFINITY;
  bool passed = false;
};

/// Checks |phi(t, w, x, u)| <= |x| e^{M t} + sup|b| sup|u| int_0^t e^{M (t-s)} ds
/// with M the largest sampled value of a along the fiber.
BoundedFlowReport check_bounded_flow(const LinearCoeffs& c, const std::vector<Fiber>& fibers, double horizon,
                                     const BoundedFlowOptions& opts = {});
/// Same bound, evaluated against an arbitrary flow claiming to solve c.
BoundedFlowReport check_bounded_flow(const LinearCoeffs& c, const SystemFlow& flow,
                                     const std::vector<Fiber>& fibers, double horizon,
                                     const BoundedFlowOptions& opts = {});

/// Two linear equations in series, the second driven by gain(theta_t w) times
/// the first state. Solved jointly in closed form on each piece; the input
/// must be cell-constant.
SystemFlow linear_pair_flow(const LinearCoeffs& up, const RandomVariable& gain, const LinearCoeffs& down);

void to_json(nlohmann::json& j, const CharacteristicValue& v);
void to_json(nlohmann::json& j, const L2Report& r);
void to_json(nlohmann::json& j, const BoundedFlowReport& r);

}  // namespace rdsio
