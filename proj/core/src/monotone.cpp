#include "rdsio/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rdsio {

bool OrthantOrder::leq(const Vec& a, const Vec& b) const {
  require_dim(a, dim_, "OrthantOrder");
  require_dim(b, dim_, "OrthantOrder");
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!(a[i] <= b[i])) return false;
  }
  return true;
}

double OrthantOrder::margin(const Vec& a, const Vec& b) const {
  require_dim(a, dim_, "OrthantOrder");
  require_dim(b, dim_, "OrthantOrder");
  double m = INFINITY;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = b[i] - a[i];
    m = std::isnan(d) ? -INFINITY : std::min(m, d);
  }
  return m;
}

namespace {

double draw_time(Sampler& s, TimeKind kind, double t_max) {
  if (kind == TimeKind::discrete) return static_cast<double>(s.integer(0, static_cast<std::int64_t>(t_max)));
  return s.uniform(0.0, t_max);
}

Vec gap(Sampler& s, std::size_t n, double min_gap) {
  Vec d(n, 0.0);
  for (double& x : d) {
    if (s.coin(0.7)) x = s.uniform(min_gap, 1.0);
  }
  return d;
}

Process gap_process(Sampler& s, std::size_t n, TimeKind kind, double min_gap) {
  switch (s.integer(0, 2)) {
    case 0:
      return Process::constant(Vec(n, 0.0), kind);
    case 1:
      return Process::constant(gap(s, n, min_gap), kind);
    default:
      return stationary(RandomVariable::cell(law::Uniform{Vec(n, min_gap), Vec(n, 1.0)}, s.bits()), kind);
  }
}

}  // namespace

MonotoneReport check_monotone(const SystemFlow& sys, const Order& order, const MonotoneOptions& opts) {
  if (order.dim() != sys.state_dim()) throw DimensionError("check_monotone: order dimension");
  const TimeKind kind = sys.time_kind();
  const std::size_t n = sys.state_dim();
  const Box box = opts.state_box.dim() == n ? opts.state_box : Box{Vec(n, -1.0), Vec(n, 1.0)};
  const InputSampler inputs = default_input_sampler(sys.input_dim(), kind, opts.input_amplitude);
  MonotoneReport rep;
  Sampler s(opts.seed, 0x3030ULL);
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const Fiber w{s.bits(), kind == TimeKind::discrete ? static_cast<double>(s.integer(-500, 500))
                                                       : s.uniform(-500.0, 500.0)};
    const Vec x = s.uniform_vec(box);
    const bool same = s.coin(0.1);
    const Vec z = same ? x : add(x, gap(s, n, opts.min_gap));
    const Process u = inputs(s);
    const Process v = (same || sys.input_dim() == 0) ? u : u + gap_process(s, sys.input_dim(), kind, opts.min_gap);
    const double t = draw_time(s, kind, opts.t_max);
    const double m = order.margin(sys(t, w, x, u), sys(t, w, z, v));
    ++rep.checked;
    if (m < 0.0) ++rep.violations;
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      char buf[160];
      std::snprintf(buf, sizeof buf, "t=%.6g seed=%llu offset=%.6g", t, static_cast<unsigned long long>(w.seed),
                    w.offset);
      rep.worst_case = buf;
    }
  }
  rep.passed = rep.checked > 0 && rep.violations == 0;
  return rep;
}

std::vector<double> bracket_grid(double tau, double horizon, double step) {
  if (!(step > 0.0)) throw Error("brackets: step must be positive");
  if (!(tau >= 0.0) || !(horizon >= tau)) throw Error("brackets: need 0 <= tau <= horizon");
  std::vector<double> grid;
  for (auto k = static_cast<std::int64_t>(std::ceil(tau / step)); static_cast<double>(k) * step <= horizon; ++k) {
    grid.push_back(static_cast<double>(k) * step);
  }
  if (grid.empty()) throw Error("brackets: empty grid on [tau, horizon]");
  return grid;
}

BracketPair brackets(const Process& u, double tau, double horizon, double step,
                     const std::optional<RandomVariable>& limit) {
  if (limit && limit->arity() != u.arity()) throw DimensionError("brackets: limit arity");
  const std::vector<double> grid = bracket_grid(tau, horizon, step);
  auto envelope = [u, grid, limit](bool lower) {
    return [u, grid, limit, lower](const Fiber& w) {
      Vec acc = limit ? (*limit)(w) : Vec(u.arity(), lower ? INFINITY : -INFINITY);
      for (double t : grid) {
        const Vec v = u(t, shift(w, -t));
        if (!all_finite(v)) throw NonFiniteError("brackets: unbounded pullback sample");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = lower ? std::min(acc[i], v[i]) : std::max(acc[i], v[i]);
      }
      return acc;
    };
  };
  return BracketPair{RandomVariable(u.arity(), envelope(true)), RandomVariable(u.arity(), envelope(false)), tau};
}

SandwichReport check_brackets(const Process& u, const std::vector<double>& taus, double horizon, double step,
                              const std::vector<Fiber>& fibers, const std::optional<RandomVariable>& limit) {
  SandwichReport rep;
  std::vector<double> sorted = taus;
  std::sort(sorted.begin(), sorted.end());
  const OrthantOrder order(u.arity());
  for (const Fiber& w : fibers) {
    Vec prev_a, prev_b;
    for (double tau : sorted) {
      const BracketPair br = brackets(u, tau, horizon, step, limit);
      for (double t : bracket_grid(tau, horizon, step)) {
        const Fiber at = shift(w, t);
        const Vec v = u(t, w);
        ++rep.checked;
        if (!order.leq(br.a_tau(at), v) || !order.leq(v, br.b_tau(at))) ++rep.violations;
      }
      const Vec a = br.a_tau(w);
      const Vec b = br.b_tau(w);
      if (!prev_a.empty() && (!order.leq(prev_a, a) || !order.leq(b, prev_b))) ++rep.monotonicity_violations;
      prev_a = a;
      prev_b = b;
    }
  }
  rep.passed = rep.checked > 0 && rep.violations == 0 && rep.monotonicity_violations == 0;
  return rep;
}

ConvergenceReport cics_experiment(const SystemFlow& sys, const RandomVariable& k_limit, const Process& u,
                                  const std::vector<RandomVariable>& initial_states,
                                  const std::vector<Fiber>& fibers, const CicsOptions& opts) {
  if (opts.schedule.empty()) throw Error("cics_experiment: empty schedule");
  if (initial_states.empty()) throw Error("cics_experiment: no initial states");
  require_dim(Vec(k_limit.arity()), sys.state_dim(), "cics_experiment limit");
  std::vector<Process> paths;
  for (const RandomVariable& x : initial_states) paths.push_back(pullback_trajectory(sys, x, u));
  const std::vector<double> schedule = opts.schedule;
  const double t_final = schedule.back();

  ConvergenceReport rep;
  rep.label = opts.label;
  rep.tol = opts.tol;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const Fiber& w = fibers[i];
    const Vec k = k_limit(w);
    FiberConvergence fc;
    fc.fiber_id = i;
    fc.limit = k;
    fc.decay_slope = -INFINITY;
    for (std::size_t j = 0; j < paths.size(); ++j) {
      const std::string series = "residual_x" + std::to_string(j);
      std::vector<double> ts, logs;
      for (double t : schedule) {
        const Vec xi = paths[j](t, w);
        const double r = max_abs_diff(xi, k);
        rep.trace.add(i, t, series, 0, r);
        if (r > 0.0 && std::isfinite(r)) {
          ts.push_back(t);
          logs.push_back(std::log(r));
        }
        if (t == t_final && !(r <= fc.final_residual)) {
          fc.final_residual = std::isnan(r) ? INFINITY : r;
          fc.final_state = xi;
        }
      }
      if (fc.final_state.empty()) fc.final_state = paths[j](t_final, w);
      fc.decay_slope = std::max(fc.decay_slope, ts.size() >= 2 ? fit_slope(ts, logs) : NAN);
    }
    fc.converged = fc.final_residual <= opts.tol;
    rep.fibers.push_back(std::move(fc));
  }
  rep.finalize();

  // Largest residual over the schedule and the initial states, as a variable.
  const RandomVariable dominating(1, [paths, schedule, k_limit](const Fiber& w) {
    const Vec k = k_limit(w);
    double m = 0.0;
    for (const Process& p : paths) {
      for (double t : schedule) m = std::max(m, max_abs_diff(p(t, w), k));
    }
    return Vec{m};
  });
  if (!fibers.empty()) {
    try {
      rep.domination = temperedness_report(dominating, fibers.front(), opts.domination);
    } catch (const Error& e) {
      rep.notes.push_back(std::string("domination diagnostic unavailable: ") + e.what());
    }
  }
  if (!rep.passed) {
    rep.notes.push_back("worst residual " + std::to_string(rep.worst_residual) + " on fiber " +
                        std::to_string(rep.worst_fiber));
  }
  return rep;
}

void to_json(nlohmann::json& j, const MonotoneReport& r) {
  j = nlohmann::json{{"checked", r.checked},
                     {"violations", r.violations},
                     {"worst_margin", json_number(r.worst_margin)},
                     {"worst_case", r.worst_case},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const SandwichReport& r) {
  j = nlohmann::json{{"checked", r.checked},
                     {"violations", r.violations},
                     {"monotonicity_violations", r.monotonicity_violations},
                     {"passed", r.passed}};
}

}  // namespace rdsio
