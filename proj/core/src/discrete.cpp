#include "rdsio/discrete.hpp"

#include <cmath>

namespace rdsio {

Vec Generator::operator()(const Fiber& w, const Vec& x, const Vec& u) const {
  require_dim(x, state_dim, "generator state");
  require_dim(u, input_dim, "generator input");
  Vec y = f(w, x, u);
  require_dim(y, state_dim, "generator value");
  return y;
}

SystemFlow flow_from_generator(const Generator& g, std::string name) {
  if (!g.f) throw Error("flow_from_generator: empty generator");
  return SystemFlow(
      TimeKind::discrete, g.state_dim, g.input_dim,
      [g](double t, const Fiber& w, const Vec& x, const Process& u) {
        const auto n = static_cast<std::int64_t>(t);
        Vec state = x;
        for (std::int64_t k = 0; k < n; ++k) {
          const auto kd = static_cast<double>(k);
          state = g(shift(w, kd), state, u(kd, w));
        }
        return state;
      },
      std::move(name));
}

Generator generator_from_flow(const SystemFlow& sys) {
  if (sys.time_kind() != TimeKind::discrete) throw Error("generator_from_flow: system must be discrete-time");
  return Generator{sys.state_dim(), sys.input_dim(), [sys](const Fiber& w, const Vec& x, const Vec& u) {
                     return sys(1.0, w, x, Process::constant(u, TimeKind::discrete));
                   }};
}

}  // namespace rdsio
