#include "rdsio/compose.hpp"

#include <algorithm>
#include <cmath>

namespace rdsio {

namespace {

Vec head(const Vec& z, std::size_t n) { return Vec(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)); }
Vec tail(const Vec& z, std::size_t n) { return Vec(z.begin() + static_cast<std::ptrdiff_t>(n), z.end()); }

RandomVariable project(const RandomVariable& z, std::size_t from, std::size_t count) {
  return RandomVariable(
      count,
      [z, from, count](const Fiber& w) {
        const Vec v = z(w);
        return Vec(v.begin() + static_cast<std::ptrdiff_t>(from),
                   v.begin() + static_cast<std::ptrdiff_t>(from + count));
      },
      z.regularity());
}

void check_link(const SystemFlow& up, const OutputMap& h1, const SystemFlow& down) {
  if (h1.state_dim() != up.state_dim()) throw DimensionError("cascade: h1 does not act on the upstream state");
  if (h1.output_dim() != down.input_dim()) throw DimensionError("cascade: h1 output dimension differs from the downstream input");
  if (up.time_kind() != down.time_kind()) throw Error("cascade: time kinds differ");
}

Process upstream_output(const SystemFlow& up, const OutputMap& h1, const Vec& x1, const Process& u) {
  return output_trajectory(up, h1, RandomVariable::constant(x1), u, false);
}

std::string name_of(const SystemFlow& up, const SystemFlow& down) { return up.name() + "*" + down.name(); }

void note(IdentityReport& r, double d) {
  ++r.checked;
  if (!(d <= r.max_discrepancy)) r.max_discrepancy = std::isnan(d) ? INFINITY : d;
}

}  // namespace

Cascade cascade(const SystemFlow& up, const OutputMap& h1, const SystemFlow& down) {
  check_link(up, h1, down);
  const std::size_t n1 = up.state_dim();
  SystemFlow combined(
      up.time_kind(), n1 + down.state_dim(), up.input_dim(),
      [up, h1, down, n1](double t, const Fiber& w, const Vec& x, const Process& u) {
        const Vec x1 = head(x, n1);
        return concat(up(t, w, x1, u), down(t, w, tail(x, n1), upstream_output(up, h1, x1, u)));
      },
      name_of(up, down));
  return Cascade{up, h1, down, std::move(combined), std::nullopt};
}

Cascade cascade(const Generator& f1, const OutputMap& h1, const Generator& f2) {
  const SystemFlow up = flow_from_generator(f1, "up");
  const SystemFlow down = flow_from_generator(f2, "down");
  check_link(up, h1, down);
  const std::size_t n1 = f1.state_dim;
  Generator g{n1 + f2.state_dim, f1.input_dim, [f1, h1, f2, n1](const Fiber& w, const Vec& x, const Vec& u) {
                const Vec x1 = head(x, n1);
                return concat(f1(w, x1, u), f2(w, tail(x, n1), h1(w, x1)));
              }};
  return Cascade{up, h1, down, flow_from_generator(g, "up*down"), g};
}

Cascade cascade(const LinearCoeffs& up, const RandomVariable& gain, const LinearCoeffs& down) {
  if (gain.arity() != 1) throw DimensionError("cascade: gain must be scalar");
  const OutputMap h1(1, 1, [gain](const Fiber& w, const Vec& x) { return Vec{gain.scalar(w) * x[0]}; });
  return Cascade{linear_system(up, "up"), h1, linear_system(down, "down"), linear_pair_flow(up, gain, down),
                 std::nullopt};
}

IdentityReport check_cascade_identity(const Cascade& c, const CascadeCheckOptions& opts) {
  const TimeKind kind = c.combined.time_kind();
  const bool exact = kind == TimeKind::discrete;
  const std::size_t n1 = c.upstream.state_dim();
  const std::size_t n = c.combined.state_dim();
  const Box box = opts.state_box.dim() == n ? opts.state_box : Box{Vec(n, -1.0), Vec(n, 1.0)};
  const InputSampler inputs =
      opts.input_sampler ? opts.input_sampler : default_input_sampler(c.combined.input_dim(), kind);
  IdentityReport rep;
  rep.name = "cascade-forward";
  rep.tol = opts.tolerance >= 0.0 ? opts.tolerance : (exact ? 0.0 : 1e-9);
  Sampler s(opts.seed, 0xca5cULL);
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const Fiber w{s.bits(), exact ? static_cast<double>(s.integer(-500, 500)) : s.uniform(-500.0, 500.0)};
    const Vec z = s.uniform_vec(box);
    const Process u = inputs(s);
    const double t = exact ? static_cast<double>(s.integer(0, static_cast<std::int64_t>(opts.t_max)))
                           : s.uniform(0.0, opts.t_max);
    const Vec lhs = c.combined(t, w, z, u);
    const Vec x1 = head(z, n1);
    const Vec rhs = concat(c.upstream(t, w, x1, u), c.downstream(t, w, tail(z, n1), upstream_output(c.upstream, c.h1, x1, u)));
    const double d = max_abs_diff(lhs, rhs);
    note(rep, exact ? d : d / std::max(1.0, sup_norm(rhs)));
  }
  rep.passed = rep.max_discrepancy <= rep.tol;
  return rep;
}

IdentityReport verify_cascade_pullback(const Cascade& c, const RandomVariable& z, const Process& u,
                                       const std::vector<double>& times, const std::vector<Fiber>& fibers,
                                       double tol) {
  require_dim(Vec(z.arity()), c.combined.state_dim(), "verify_cascade_pullback initial state");
  const std::size_t n1 = c.upstream.state_dim();
  const std::size_t n2 = c.downstream.state_dim();
  const RandomVariable x1 = project(z, 0, n1);
  const RandomVariable x2 = project(z, n1, n2);
  const Process lhs = pullback_trajectory(c.combined, z, u);
  const Process rhs = pullback_trajectory(c.downstream, x2, output_trajectory(c.upstream, c.h1, x1, u, false));

  IdentityReport rep;
  rep.name = "cascade-pullback";
  rep.tol = tol;
  for (const Fiber& w : fibers) {
    for (double t : times) note(rep, max_abs_diff(tail(lhs(t, w), n1), rhs(t, w)));
  }
  if (c.generator && c.combined.input_dim() == 0) {
    const Process advanced = pullback_trajectory(c.combined, advance_state(*c.generator, z), u);
    for (const Fiber& w : fibers) {
      for (double t : times) note(rep, max_abs_diff(tail(lhs(t + 1.0, w), n1), tail(advanced(t, w), n1)));
    }
  }
  rep.passed = rep.max_discrepancy <= tol;
  return rep;
}

RandomVariable advance_state(const Generator& f, const RandomVariable& x) {
  if (f.input_dim != 0) throw Error("advance_state: generator must be input-free");
  return RandomVariable(f.state_dim, [f, x](const Fiber& w) {
    const Fiber past = shift(w, -1.0);
    return f(past, x(past), Vec{});
  });
}

IdentityReport check_shift_lemma(const Generator& f, const OutputMap& h, const RandomVariable& x,
                                 const std::vector<double>& times, const std::vector<Fiber>& fibers) {
  const SystemFlow sys = flow_from_generator(f);
  const Process none = Process::none(TimeKind::discrete);
  const Process lhs = output_trajectory(sys, h, advance_state(f, x), none, false);
  const Process rhs = rho(output_trajectory(sys, h, x, none, false), 1.0);
  IdentityReport rep;
  rep.name = "shift-lemma";
  for (const Fiber& w : fibers) {
    for (double t : times) note(rep, max_abs_diff(lhs(t, w), rhs(t, w)));
  }
  rep.passed = rep.max_discrepancy == 0.0;
  return rep;
}

LipschitzReport check_lipschitz(const OutputMap& h, const RandomVariable& L, const LipschitzOptions& opts) {
  if (L.arity() != 1) throw DimensionError("check_lipschitz: L must be scalar");
  const std::size_t n = h.state_dim();
  const Box box = opts.box.dim() == n ? opts.box : Box{Vec(n, -1.0), Vec(n, 1.0)};
  Sampler s(opts.seed, 0x11b5ULL);
  auto draw = [&]() {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isfinite(box.lo[i]) && std::isfinite(box.hi[i])) {
        x[i] = s.uniform(box.lo[i], box.hi[i]);
      } else {
        const double mag = std::exp(s.uniform(-5.0, 15.0));
        x[i] = s.coin() ? mag : -mag;
        x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
      }
    }
    return x;
  };
  LipschitzReport rep;
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const Fiber w{s.bits(), s.uniform(-500.0, 500.0)};
    const Vec x1 = draw();
    const Vec x2 = draw();
    const double l = L.scalar(w);
    if (l < 0.0) throw Error("check_lipschitz: L must be nonnegative");
    const double dx = max_abs_diff(x1, x2);
    const double dy = max_abs_diff(h(w, x1), h(w, x2));
    ++rep.checked;
    const double allowed = l * dx;
    if (dy > allowed * (1.0 + 1e-12)) ++rep.violations;
    if (dx > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, allowed > 0.0 ? dy / allowed : (dy > 0 ? INFINITY : 0.0));
  }
  rep.tempered = temperedness_report(L, Fiber{opts.seed, 0.5}, opts.tempered);
  rep.passed = rep.checked > 0 && rep.violations == 0 && rep.tempered.tempered_consistent;
  return rep;
}

FeedbackLoop feedback(const Generator& g1, const OutputMap& h1, const Generator& g2, const OutputMap& h2) {
  if (h1.state_dim() != g1.state_dim || h2.state_dim() != g2.state_dim) {
    throw DimensionError("feedback: output maps must act on their own system's state");
  }
  if (h1.output_dim() != g2.input_dim || h2.output_dim() != g1.input_dim) {
    throw DimensionError("feedback: each output must match the other system's input");
  }
  const std::size_t n1 = g1.state_dim;
  Generator closed{n1 + g2.state_dim, 0, [g1, h1, g2, h2, n1](const Fiber& w, const Vec& x, const Vec&) {
                     const Vec x1 = head(x, n1);
                     const Vec x2 = tail(x, n1);
                     return concat(g1(w, x1, h2(w, x2)), g2(w, x2, h1(w, x1)));
                   }};
  return FeedbackLoop{g1, h1, g2, h2, flow_from_generator(closed, "loop")};
}

LoopSignals loop_signals(const FeedbackLoop& loop, std::size_t n, const Fiber& w, const Vec& x1, const Vec& x2) {
  LoopSignals s;
  s.x1.push_back(x1);
  s.x2.push_back(x2);
  for (std::size_t k = 0; k < n; ++k) {
    const Fiber at = shift(w, static_cast<double>(k));
    s.nu.push_back(loop.h1(at, s.x1.back()));
    s.mu.push_back(loop.h2(at, s.x2.back()));
    s.x1.push_back(loop.g1(at, s.x1.back(), s.mu.back()));
    s.x2.push_back(loop.g2(at, s.x2.back(), s.nu.back()));
  }
  return s;
}

double loop_equation_residual(const FeedbackLoop& loop, std::size_t n, const Fiber& w, const Vec& x1,
                              const Vec& x2) {
  const LoopSignals s = loop_signals(loop, n, w, x1, x2);
  // The recorded signals as processes; only meaningful on this fiber.
  auto table = [](const std::vector<Vec>& v, std::size_t dim) {
    return Process(dim, TimeKind::discrete, [v](double t, const Fiber&) { return v.at(static_cast<std::size_t>(t)); });
  };
  const Process mu = table(s.mu, loop.g1.input_dim);
  const Process nu = table(s.nu, loop.g2.input_dim);
  const SystemFlow phi1 = flow_from_generator(loop.g1);
  const SystemFlow phi2 = flow_from_generator(loop.g2);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = static_cast<double>(k);
    const Fiber at = shift(w, t);
    worst = std::max(worst, max_abs_diff(s.nu[k], loop.h1(at, phi1(t, w, x1, mu))));
    worst = std::max(worst, max_abs_diff(s.mu[k], loop.h2(at, phi2(t, w, x2, nu))));
    worst = std::max(worst, max_abs_diff(concat(s.x1[k], s.x2[k]), loop.closed(t, w, concat(x1, x2))));
  }
  return worst;
}

OrbitTable tabulate(const RandomVariable& r, const Fiber& w, std::int64_t first) {
  if (first > 0) throw Error("tabulate: first index must be <= 0");
  OrbitTable t;
  t.first = first;
  for (std::int64_t k = first; k <= 0; ++k) t.values.push_back(r(shift(w, static_cast<double>(k))));
  return t;
}

EquilibriumTables input_equilibrium(const Generator& g, const OutputMap& h, const OrbitTable& input,
                                    const Fiber& w, std::size_t burn_in, const Vec& start) {
  if (input.size() <= burn_in) throw Error("input_equilibrium: table shorter than the burn-in");
  EquilibriumTables out;
  out.state.first = input.first + static_cast<std::int64_t>(burn_in);
  out.output.first = out.state.first;
  Vec x = start;
  for (std::int64_t k = input.first;; ++k) {
    const Fiber at = shift(w, static_cast<double>(k));
    if (k >= out.state.first) {
      out.state.values.push_back(x);
      out.output.values.push_back(h(at, x));
    }
    if (k == 0) break;
    x = g(at, x, input.at(k));
  }
  return out;
}

TableMap output_characteristic_map(const Generator& g, const OutputMap& h, std::size_t burn_in, Vec start) {
  return [g, h, burn_in, start = std::move(start)](const OrbitTable& input, const Fiber& w) {
    return input_equilibrium(g, h, input, w, burn_in, start).output;
  };
}

TableMap compose_maps(TableMap first, TableMap second) {
  return [first = std::move(first), second = std::move(second)](const OrbitTable& input, const Fiber& w) {
    return second(first(input, w), w);
  };
}

namespace {

double table_distance(const OrbitTable& a, const OrbitTable& b) {
  const std::int64_t from = std::max(a.first, b.first);
  double d = 0.0;
  for (std::int64_t k = from; k <= 0; ++k) {
    const double x = max_abs_diff(a.at(k), b.at(k));
    d = std::isnan(x) ? INFINITY : std::max(d, x);
  }
  return d;
}

}  // namespace

SmallGainReport small_gain_iterate(const TableMap& charmap, const RandomVariable& seed_input,
                                   const std::vector<Fiber>& fibers, const SmallGainOptions& opts) {
  SmallGainReport rep;
  const auto first = -static_cast<std::int64_t>(opts.window);
  std::size_t iters = 0;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const Fiber& w = fibers[i];
    SmallGainFiber f;
    f.fiber_id = i;
    std::vector<OrbitTable> history{tabulate(seed_input, w, first)};
    for (std::size_t j = 0; j < opts.max_iters; ++j) {
      OrbitTable next;
      try {
        next = charmap(history.back(), w);
      } catch (const Error& e) {
        rep.notes.push_back("fiber " + std::to_string(i) + ": stopped after " + std::to_string(j) +
                            " iterations (" + e.what() + ")");
        break;
      }
      f.distance.push_back(table_distance(next, history.back()));
      if (history.size() >= 2) f.distance2.push_back(table_distance(next, history[history.size() - 2]));
      history.push_back(std::move(next));
      if (history.size() > 3) history.erase(history.begin());
      if (f.distance.back() <= opts.tol) {
        f.converged = true;
        break;
      }
      if (!f.distance2.empty() && f.distance.back() >= opts.cycle_floor &&
          f.distance2.back() <= opts.cycle_ratio * f.distance.back()) {
        f.period_two = true;
        break;
      }
    }
    f.table = history.back();
    f.fixed_point = f.table.at(0);
    iters = std::max(iters, f.distance.size());
    for (std::size_t j = 0; j < f.distance.size(); ++j) {
      rep.trace.add(i, static_cast<double>(j + 1), "sup_distance", 0, f.distance[j]);
    }
    rep.fibers.push_back(std::move(f));
  }
  rep.iterations = iters;
  rep.sup_distance.assign(iters, 0.0);
  for (const auto& f : rep.fibers) {
    for (std::size_t j = 0; j < iters; ++j) {
      const double d = j < f.distance.size() ? f.distance[j] : 0.0;
      rep.sup_distance[j] = std::max(rep.sup_distance[j], d);
    }
  }
  std::vector<double> js, logs;
  for (std::size_t j = 0; j < iters; ++j) {
    const double d = rep.sup_distance[j];
    if (d > 1e3 * opts.tol && std::isfinite(d)) {
      js.push_back(static_cast<double>(j));
      logs.push_back(std::log(d));
    }
  }
  if (js.size() >= 2) rep.rate = std::exp(fit_slope(js, logs));
  rep.converged = !rep.fibers.empty() &&
                  std::all_of(rep.fibers.begin(), rep.fibers.end(), [](const SmallGainFiber& f) { return f.converged; });
  rep.period_two =
      std::any_of(rep.fibers.begin(), rep.fibers.end(), [](const SmallGainFiber& f) { return f.period_two; });
  if (rep.period_two) rep.notes.push_back("period-two orbit detected: small-gain condition fails");
  return rep;
}

LoopEquilibrium reconstruct_equilibrium(const FeedbackLoop& loop, const OrbitTable& mu, const Fiber& w,
                                        std::size_t burn_in, const Vec& start1, const Vec& start2) {
  const EquilibriumTables first = input_equilibrium(loop.g1, loop.h1, mu, w, burn_in, start1);
  const EquilibriumTables second = input_equilibrium(loop.g2, loop.h2, first.output, w, burn_in, start2);
  return LoopEquilibrium{first.state.at(0), second.state.at(0), mu.at(0), first.output.at(0)};
}

void to_json(nlohmann::json& j, const IdentityReport& r) {
  j = nlohmann::json{{"identity", r.name},
                     {"max_discrepancy", json_number(r.max_discrepancy)},
                     {"checked", r.checked},
                     {"tol", json_number(r.tol)},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const LipschitzReport& r) {
  j = nlohmann::json{{"checked", r.checked},
                     {"violations", r.violations},
                     {"worst_ratio", json_number(r.worst_ratio)},
                     {"tempered", r.tempered},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const SmallGainReport& r) {
  nlohmann::json fibers = nlohmann::json::array();
  for (const auto& f : r.fibers) {
    fibers.push_back({{"fiber_id", f.fiber_id},
                      {"iterations", f.distance.size()},
                      {"final_distance", json_number(f.distance.empty() ? NAN : f.distance.back())},
                      {"fixed_point", json_vec(f.fixed_point)},
                      {"converged", f.converged},
                      {"period_two", f.period_two}});
  }
  j = nlohmann::json{{"sup_distance", json_vec(r.sup_distance)},
                     {"rate", json_number(r.rate)},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"period_two", r.period_two},
                     {"notes", r.notes},
                     {"fibers", fibers}};
}

}  // namespace rdsio
