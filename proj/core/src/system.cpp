#include "rdsio/system.hpp"

#include <cmath>

namespace rdsio {

SystemFlow::SystemFlow(TimeKind kind, std::size_t state_dim, std::size_t input_dim, Flow flow, std::string name)
    : kind_(kind),
      state_dim_(state_dim),
      input_dim_(input_dim),
      flow_(std::make_shared<const Flow>(std::move(flow))),
      name_(std::move(name)) {
  if (state_dim_ == 0) throw DimensionError("SystemFlow: state dimension must be positive");
}

Vec SystemFlow::operator()(double t, const Fiber& w, const Vec& x, const Process& u) const {
  if (!(t >= 0.0)) throw Error("SystemFlow: time must be nonnegative");
  if (kind_ == TimeKind::discrete && std::floor(t) != t) throw Error("SystemFlow: discrete time must be integer");
  require_dim(x, state_dim_, "SystemFlow state");
  if (u.arity() != input_dim_) {
    throw DimensionError("SystemFlow input: expected dimension " + std::to_string(input_dim_) + ", got " +
                         std::to_string(u.arity()));
  }
  if (u.time_kind() != kind_) throw Error("SystemFlow: input time kind differs from the system's");
  return (*flow_)(t, w, x, u);
}

Vec SystemFlow::operator()(double t, const Fiber& w, const Vec& x) const {
  return (*this)(t, w, x, Process::none(kind_));
}

OutputMap::OutputMap(std::size_t state_dim, std::size_t output_dim, Map map)
    : state_dim_(state_dim), output_dim_(output_dim), map_(std::make_shared<const Map>(std::move(map))) {}

Vec OutputMap::operator()(const Fiber& w, const Vec& x) const {
  require_dim(x, state_dim_, "OutputMap state");
  Vec y = (*map_)(w, x);
  require_dim(y, output_dim_, "OutputMap value");
  return y;
}

OutputMap OutputMap::identity(std::size_t dim) {
  return OutputMap(dim, dim, [](const Fiber&, const Vec& x) { return x; });
}

Process forward_trajectory(const SystemFlow& sys, const RandomVariable& x, const Process& u) {
  require_dim(Vec(x.arity()), sys.state_dim(), "forward_trajectory initial state");
  return Process(
      sys.state_dim(), sys.time_kind(), [sys, x, u](double t, const Fiber& w) { return sys(t, w, x(w), u); },
      Regularity::cell_smooth, u.breaks());
}

Process pullback_trajectory(const SystemFlow& sys, const RandomVariable& x, const Process& u) {
  require_dim(Vec(x.arity()), sys.state_dim(), "pullback_trajectory initial state");
  return Process(sys.state_dim(), sys.time_kind(), [sys, x, u](double t, const Fiber& w) {
    const Fiber past = shift(w, -t);
    return sys(t, past, x(past), u);
  });
}

Process output_trajectory(const SystemFlow& sys, const OutputMap& h, const RandomVariable& x, const Process& u,
                          bool pullback) {
  if (h.state_dim() != sys.state_dim()) throw DimensionError("output_trajectory: output map state dimension");
  require_dim(Vec(x.arity()), sys.state_dim(), "output_trajectory initial state");
  if (pullback) {
    return Process(h.output_dim(), sys.time_kind(), [sys, h, x, u](double t, const Fiber& w) {
      const Fiber past = shift(w, -t);
      return h(w, sys(t, past, x(past), u));
    });
  }
  return Process(
      h.output_dim(), sys.time_kind(),
      [sys, h, x, u](double t, const Fiber& w) { return h(shift(w, t), sys(t, w, x(w), u)); },
      Regularity::cell_smooth, u.breaks());
}

RandomVariable apply_output(const OutputMap& h, const RandomVariable& x) {
  require_dim(Vec(x.arity()), h.state_dim(), "apply_output");
  return RandomVariable(h.output_dim(), [h, x](const Fiber& w) { return h(w, x(w)); });
}

}  // namespace rdsio
