#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rdsio/process.hpp"

namespace rdsio {

/// Flow of a random dynamical system with inputs: phi(t, w, x, u).
///
/// The flow is expected to satisfy the RDSI axioms: phi(0, w, x, u) = x, the
/// splice identity phi(s+t, w, x, u <>_s v) = phi(t, theta_s w, phi(s, w, x, u), v),
/// and causality in the input. `check_axioms` tests them on samples.
class SystemFlow {
 public:
  using Flow = std::function<Vec(double t, const Fiber& w, const Vec& x, const Process& u)>;

  SystemFlow(TimeKind kind, std::size_t state_dim, std::size_t input_dim, Flow flow, std::string name = {});

  /// Validates dimensions and the time argument, then evaluates the flow.
  Vec operator()(double t, const Fiber& w, const Vec& x, const Process& u) const;
  /// Input-free evaluation (input dimension must be zero).
  Vec operator()(double t, const Fiber& w, const Vec& x) const;

  TimeKind time_kind() const { return kind_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t input_dim() const { return input_dim_; }
  const std::string& name() const { return name_; }

 private:
  TimeKind kind_;
  std::size_t state_dim_;
  std::size_t input_dim_;
  std::shared_ptr<const Flow> flow_;
  std::string name_;
};

/// Output function h(w, x), continuous in x.
class OutputMap {
 public:
  using Map = std::function<Vec(const Fiber& w, const Vec& x)>;

  OutputMap(std::size_t state_dim, std::size_t output_dim, Map map);

  Vec operator()(const Fiber& w, const Vec& x) const;
  std::size_t state_dim() const { return state_dim_; }
  std::size_t output_dim() const { return output_dim_; }

  static OutputMap identity(std::size_t dim);

 private:
  std::size_t state_dim_;
  std::size_t output_dim_;
  std::shared_ptr<const Map> map_;
};

/// xi_t(w) = phi(t, w, x(w), u).
Process forward_trajectory(const SystemFlow& sys, const RandomVariable& x, const Process& u);
/// xi^_t(w) = phi(t, theta_{-t} w, x(theta_{-t} w), u); the input is not shifted.
Process pullback_trajectory(const SystemFlow& sys, const RandomVariable& x, const Process& u);
/// eta_t(w) = h(theta_t w, xi_t(w)), or its pullback h(w, xi^_t(w)).
Process output_trajectory(const SystemFlow& sys, const OutputMap& h, const RandomVariable& x, const Process& u,
                          bool pullback);

/// Composition w -> h(w, x(w)).
RandomVariable apply_output(const OutputMap& h, const RandomVariable& x);

}  // namespace rdsio
