#pragma once

#include <functional>
#include <string>

#include "rdsio/system.hpp"

namespace rdsio {

/// One-step map f(w, x, u~) of a discrete-time system.
struct Generator {
  using Step = std::function<Vec(const Fiber& w, const Vec& x, const Vec& u)>;

  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  Step f;

  Vec operator()(const Fiber& w, const Vec& x, const Vec& u) const;
};

/// phi(0, w, x, u) = x and phi(n+1, w, x, u) = f(theta_n w, phi(n, w, x, u), u_n(w)).
SystemFlow flow_from_generator(const Generator& g, std::string name = {});

/// f(w, x, u~) = phi(1, w, x, c(u~)).
Generator generator_from_flow(const SystemFlow& sys);

}  // namespace rdsio
