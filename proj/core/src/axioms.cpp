#include "rdsio/axioms.hpp"

#include <cmath>
#include <cstdio>

namespace rdsio {

namespace {

double draw_time(Sampler& s, TimeKind kind, double t_max) {
  if (kind == TimeKind::discrete) return static_cast<double>(s.integer(0, static_cast<std::int64_t>(t_max)));
  return s.uniform(0.0, t_max);
}

Process basic_input(Sampler& s, std::size_t dim, TimeKind kind, double amp) {
  const Box box{Vec(dim, -amp), Vec(dim, amp)};
  switch (s.integer(0, 2)) {
    case 0:
      return Process::constant(s.uniform_vec(box), kind);
    case 1:
      return stationary(RandomVariable::cell(law::Uniform{box.lo, box.hi}, s.bits()), kind);
    default: {
      const RandomVariable limit = RandomVariable::cell(law::Uniform{box.lo, box.hi}, s.bits());
      const RandomVariable kick = RandomVariable::cell(law::Uniform{box.lo, box.hi}, s.bits());
      return Process(dim, kind, [limit, kick](double t, const Fiber& w) {
        const Fiber at = shift(w, t);
        return add(limit(at), scale(std::exp(-t), kick(at)));
      });
    }
  }
}

std::string describe(double s, double t, const Fiber& w) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "s=%.6g t=%.6g seed=%llu offset=%.6g", s, t,
                static_cast<unsigned long long>(w.seed), w.offset);
  return buf;
}

void record(AxiomResult& r, double violation, double tol, const std::string& where) {
  ++r.checked;
  if (!(violation <= tol)) {
    ++r.violations;
    r.passed = false;
  }
  if (!(violation <= r.max_violation)) {
    r.max_violation = std::isnan(violation) ? INFINITY : violation;
    r.worst_case = where;
  }
}

}  // namespace

InputSampler default_input_sampler(std::size_t dim, TimeKind kind, double amplitude) {
  return [dim, kind, amplitude](Sampler& s) -> Process {
    if (dim == 0) return Process::none(kind);
    if (s.coin(0.3)) {
      const Process a = basic_input(s, dim, kind, amplitude);
      const Process b = basic_input(s, dim, kind, amplitude);
      return concat(a, b, draw_time(s, kind, 10.0));
    }
    return basic_input(s, dim, kind, amplitude);
  };
}

std::vector<std::string> AxiomReport::failed() const {
  std::vector<std::string> out;
  for (const AxiomResult* r : {&identity, &splice, &causality}) {
    if (!r->passed) out.push_back(r->name);
  }
  return out;
}

AxiomReport check_axioms(const SystemFlow& sys, const AxiomOptions& opts) {
  if (opts.samples < 1) throw Error("check_axioms: need at least one sample");
  const TimeKind kind = sys.time_kind();
  const bool exact = kind == TimeKind::discrete;
  const double tol = opts.tolerance >= 0.0 ? opts.tolerance : (exact ? 0.0 : 1e-9);
  const Box box = opts.state_box.dim() == sys.state_dim()
                      ? opts.state_box
                      : Box{Vec(sys.state_dim(), -1.0), Vec(sys.state_dim(), 1.0)};
  const InputSampler inputs =
      opts.input_sampler ? opts.input_sampler : default_input_sampler(sys.input_dim(), kind);

  AxiomReport rep;
  rep.tolerance = tol;
  rep.identity.name = "I3";
  rep.splice.name = "I4";
  rep.causality.name = "I5";

  // Exact mode compares bit patterns; otherwise the error is relative with
  // magnitudes below one treated as one.
  auto discrepancy = [exact](const Vec& a, const Vec& b) {
    const double d = max_abs_diff(a, b);
    if (exact) return d;
    return d / std::max(1.0, sup_norm(b));
  };

  Sampler s(opts.seed, 0xa810ULL);
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const Fiber w{s.bits(), kind == TimeKind::discrete ? static_cast<double>(s.integer(-500, 500))
                                                       : s.uniform(-500.0, 500.0)};
    const Vec x = s.uniform_vec(box);
    const Process u = inputs(s);
    const Process v = inputs(s);
    const double st = draw_time(s, kind, opts.t_max);
    const double tt = draw_time(s, kind, opts.t_max);

    record(rep.identity, max_abs_diff(sys(0.0, w, x, u), x), 0.0, describe(0.0, 0.0, w));

    const Vec lhs = sys(st + tt, w, x, concat(u, v, st));
    const Vec rhs = sys(tt, shift(w, st), sys(st, w, x, u), v);
    record(rep.splice, discrepancy(lhs, rhs), tol, describe(st, tt, w));

    // Inputs that agree on [0, t) but differ afterwards.
    const Process other = concat(u, inputs(s), tt);
    record(rep.causality, discrepancy(sys(tt, w, x, u), sys(tt, w, x, other)), tol, describe(0.0, tt, w));
  }
  return rep;
}

void to_json(nlohmann::json& j, const AxiomResult& r) {
  j = nlohmann::json{{"axiom", r.name},
                     {"max_violation", json_number(r.max_violation)},
                     {"violations", r.violations},
                     {"checked", r.checked},
                     {"worst_case", r.worst_case},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const AxiomReport& r) {
  j = nlohmann::json{{"tolerance", json_number(r.tolerance)},
                     {"axioms", {r.identity, r.splice, r.causality}},
                     {"passed", r.passed()},
                     {"failed", r.failed()}};
}

}  // namespace rdsio
