#include <algorithm>
#include <cmath>

#include "document.hpp"

namespace rdsio::scenario::detail {

namespace {

using nlohmann::json;

std::vector<Fiber> fibers_for(const Context& ctx, std::uint64_t seed, std::size_t count) {
  return make_fibers(seed, count, ctx.time);
}

double default_step(TimeKind time) { return time == TimeKind::discrete ? 1.0 : 0.5; }

void state_trace(Trace& trace, const Context& ctx, const RandomVariable& x0, const std::vector<Fiber>& fibers,
                 double horizon, double step) {
  const Process xi = forward_trajectory(ctx.system.flow, x0, ctx.input.process);
  const auto grid = time_grid(0.0, horizon, step);
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    for (double t : grid) trace.add(i, t, "state", xi(t, fibers[i]));
  }
}

RandomVariable zero_state(const Context& ctx) { return RandomVariable::constant(Vec(ctx.system.flow.state_dim(), 0.0)); }

RandomVariable initial_state(Map& m, const Context& ctx) {
  return m.has("initial") ? parse_variable(m.doc(), m.get("initial"), ctx.system.flow.state_dim()) : zero_state(ctx);
}

const RandomVariable& stationary_base(const Map& m, const Context& ctx) {
  if (!ctx.input.base) m.doc().fail(m.node(), m.what() + " needs a constant or stationary input");
  return *ctx.input.base;
}

const LinearCoeffs& linear_of(const Map& m, const Context& ctx) {
  if (!ctx.system.linear) m.doc().fail(m.node(), m.what() + " needs a linear system");
  return *ctx.system.linear;
}

const Generator& generator_of(const Map& m, const SystemModel& s, const char* role) {
  if (!s.generator) m.doc().fail(m.node(), std::string(m.what()) + ": " + role + " must be a generator system");
  return *s.generator;
}

// Experiments -----------------------------------------------------------

Runner axioms(Map& m, const Context& ctx) {
  m.allow({"type", "samples", "t_max", "tolerance"});
  AxiomOptions o;
  o.samples = m.count("samples", 1000);
  o.t_max = m.number("t_max", 30.0);
  o.tolerance = m.number("tolerance", -1.0);
  if (o.samples == 0) m.doc().fail(m.get("samples"), "samples must be positive");
  return [ctx, o](std::uint64_t seed, std::size_t count) mutable {
    o.seed = seed;
    const AxiomReport rep = check_axioms(ctx.system.flow, o);
    Outcome out{rep.passed(), rep, {}};
    state_trace(out.trace, ctx, zero_state(ctx), fibers_for(ctx, seed, count), std::min(o.t_max, 30.0),
                default_step(ctx.time));
    return out;
  };
}

Runner roundtrip(Map& m, const Context& ctx) {
  m.allow({"type", "samples", "horizon"});
  const Generator g = generator_of(m, ctx.system, "the system");
  const std::size_t samples = m.count("samples", 500);
  const auto horizon = static_cast<std::int64_t>(m.count("horizon", 50));
  return [ctx, g, samples, horizon](std::uint64_t seed, std::size_t count) {
    const SystemFlow sys = flow_from_generator(g);
    const SystemFlow again = flow_from_generator(generator_from_flow(sys));
    const Generator back = generator_from_flow(sys);
    const InputSampler inputs = default_input_sampler(g.input_dim, TimeKind::discrete);
    const Box box{Vec(g.state_dim, -1.0), Vec(g.state_dim, 1.0)};
    Sampler s(seed, 0x7077ULL);
    std::size_t flow_bad = 0, gen_bad = 0;
    for (std::size_t k = 0; k < samples; ++k) {
      const Fiber w{s.bits(), static_cast<double>(s.integer(-500, 500))};
      const Vec x = s.uniform_vec(box);
      const Process u = inputs(s);
      const auto n = static_cast<double>(s.integer(0, horizon));
      if (again(n, w, x, u) != sys(n, w, x, u)) ++flow_bad;
      const Vec uu = s.uniform_vec(Box{Vec(g.input_dim, -1.0), Vec(g.input_dim, 1.0)});
      if (back(w, x, uu) != g(w, x, uu)) ++gen_bad;
    }
    Outcome out{flow_bad == 0 && gen_bad == 0,
                json{{"samples", samples},
                     {"horizon", horizon},
                     {"flow_generator_flow_mismatches", flow_bad},
                     {"generator_flow_generator_mismatches", gen_bad}},
                {}};
    state_trace(out.trace, ctx, zero_state(ctx), fibers_for(ctx, seed, count), static_cast<double>(horizon), 1.0);
    return out;
  };
}

Runner characteristic_exp(Map& m, const Context& ctx) {
  m.allow({"type", "initial", "horizon", "tol", "step", "equilibrium_span", "agreement"});
  const RandomVariable u = stationary_base(m, ctx);
  const RandomVariable x0 = initial_state(m, ctx);
  EstimateOptions o;
  o.horizon = m.number("horizon", o.horizon);
  o.tol = m.number("tol", o.tol);
  o.step = m.number("step", default_step(ctx.time));
  o.equilibrium_span = m.number("equilibrium_span", o.equilibrium_span);
  if (!(o.horizon > 0) || !(o.tol > 0) || !(o.step > 0)) m.doc().fail(m.node(), "horizon, tol and step must be positive");
  std::optional<double> agreement;
  if (m.has("agreement")) {
    linear_of(m, ctx);
    agreement = m.number("agreement");
  }
  return [ctx, u, x0, o, agreement](std::uint64_t seed, std::size_t count) {
    const auto fibers = fibers_for(ctx, seed, count);
    CharacteristicEstimate est = estimate_characteristic(ctx.system.flow, u, x0, fibers, o);
    bool passed = est.report.passed && est.equilibrium.passed;
    json result{{"estimate", est.report}, {"equilibrium", est.equilibrium}};
    if (agreement) {
      double worst = 0.0;
      for (std::size_t i = 0; i < fibers.size(); ++i) {
        const double k = characteristic(*ctx.system.linear, u, fibers[i]).value;
        worst = std::max(worst, std::abs(k - est.report.fibers[i].limit[0]));
        est.report.trace.add(i, o.horizon, "closed_form", 0, k);
      }
      result["closed_form_gap"] = json_number(worst);
      result["agreement"] = *agreement;
      passed = passed && worst <= *agreement;
    }
    return Outcome{passed, result, est.report.trace};
  };
}

Runner equilibrium_exp(Map& m, const Context& ctx) {
  m.allow({"type", "candidate", "horizon", "step", "tol"});
  const RandomVariable cand = parse_variable(m.doc(), m.get("candidate"), ctx.system.flow.state_dim());
  std::optional<RandomVariable> u;
  if (ctx.system.flow.input_dim() > 0) u = stationary_base(m, ctx);
  const double horizon = m.number("horizon", 10.0);
  const double step = m.number("step", default_step(ctx.time));
  const double tol = m.number("tol", 1e-9);
  return [ctx, cand, u, horizon, step, tol](std::uint64_t seed, std::size_t count) {
    const auto fibers = fibers_for(ctx, seed, count);
    const EquilibriumReport rep =
        check_equilibrium(ctx.system.flow, EquilibriumCandidate{cand, u}, time_grid(0, horizon, step), fibers, tol);
    Outcome out{rep.passed, rep, {}};
    const Process path = pullback_trajectory(ctx.system.flow, cand,
                                             u ? stationary(*u, ctx.time).process() : Process::none(ctx.time));
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      for (double t : time_grid(0, horizon, step)) {
        out.trace.add(i, t, "residual", 0, max_abs_diff(path(t, fibers[i]), cand(fibers[i])));
      }
    }
    return out;
  };
}

Runner decay(Map& m, const Context& ctx) {
  m.allow({"type", "lambda", "initial", "fit_from", "fit_to", "step", "min_fraction"});
  const LinearCoeffs c = linear_of(m, ctx);
  const RandomVariable u = stationary_base(m, ctx);
  const RandomVariable x0 = initial_state(m, ctx);
  const double lambda = m.number("lambda");
  if (!(lambda > 0)) m.doc().fail(m.get("lambda"), "lambda must be positive");
  const double from = m.number("fit_from", 5.0);
  const double to = m.number("fit_to", 40.0);
  const double step = m.number("step", 1.0);
  const double min_fraction = m.number("min_fraction", 0.95);
  return [ctx, c, u, x0, lambda, from, to, step, min_fraction](std::uint64_t seed, std::size_t count) {
    const auto fibers = fibers_for(ctx, seed, count);
    const L2Report l2 = check_L2(c, lambda, fibers);
    const RandomVariable k = characteristic_rv(c, u);
    const Process path = pullback_trajectory(ctx.system.flow, x0, stationary(u, ctx.time).process());
    Outcome out;
    std::size_t good = 0;
    json slopes = json::array();
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      const double ki = k.scalar(fibers[i]);
      std::vector<double> ts, logs;
      for (double t : time_grid(from, to, step)) {
        const double r = std::abs(path(t, fibers[i])[0] - ki);
        out.trace.add(i, t, "residual", 0, r);
        // Residuals at rounding level carry no slope information.
        if (r > 1e-13 * std::max(1.0, std::abs(ki))) {
          ts.push_back(t);
          logs.push_back(std::log(r));
        }
      }
      const double slope = ts.size() >= 2 ? fit_slope(ts, logs) : -INFINITY;
      if (slope <= -0.5 * lambda) ++good;
      slopes.push_back(json_number(slope));
    }
    const double fraction = fibers.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(fibers.size());
    out.passed = l2.passed && fraction >= min_fraction;
    out.result = json{{"L2", l2}, {"slopes", slopes}, {"fraction", fraction}, {"min_fraction", min_fraction}};
    return out;
  };
}

Runner monotone(Map& m, const Context& ctx) {
  m.allow({"type", "samples", "t_max", "min_gap", "input_amplitude"});
  MonotoneOptions o;
  o.samples = m.count("samples", o.samples);
  o.t_max = m.number("t_max", o.t_max);
  o.min_gap = m.number("min_gap", o.min_gap);
  o.input_amplitude = m.number("input_amplitude", o.input_amplitude);
  return [ctx, o](std::uint64_t seed, std::size_t count) mutable {
    o.seed = seed;
    const MonotoneReport rep = check_monotone(ctx.system.flow, OrthantOrder(ctx.system.flow.state_dim()), o);
    Outcome out{rep.passed, rep, {}};
    state_trace(out.trace, ctx, zero_state(ctx), fibers_for(ctx, seed, count), o.t_max, default_step(ctx.time));
    return out;
  };
}

Runner cics(Map& m, const Context& ctx) {
  m.allow({"type", "initial", "horizon", "step", "tol", "monotone_samples"});
  const LinearCoeffs c = linear_of(m, ctx);
  if (!ctx.input.limit && !ctx.input.base) m.doc().fail(m.node(), "cics needs a converging or stationary input");
  const RandomVariable u_inf = ctx.input.limit ? *ctx.input.limit : *ctx.input.base;
  std::vector<RandomVariable> states;
  const YAML::Node init = m.get("initial");
  if (!init.IsSequence() || init.size() == 0) m.doc().fail(init, "initial must be a list of variables");
  for (const auto& e : init) states.push_back(parse_variable(m.doc(), e, 1));
  CicsOptions o;
  o.schedule = time_grid(0, m.number("horizon", 40.0), m.number("step", 2.0));
  o.tol = m.number("tol", o.tol);
  MonotoneOptions mo;
  mo.samples = m.count("monotone_samples", 1000);
  return [ctx, c, u_inf, states, o, mo](std::uint64_t seed, std::size_t count) mutable {
    mo.seed = seed;
    const MonotoneReport mono = check_monotone(ctx.system.flow, OrthantOrder(1), mo);
    const ConvergenceReport rep =
        cics_experiment(ctx.system.flow, characteristic_rv(c, u_inf), ctx.input.process, states,
                        fibers_for(ctx, seed, count), o);
    return Outcome{mono.passed && rep.passed, json{{"monotone", mono}, {"convergence", rep}}, rep.trace};
  };
}

Runner brackets_exp(Map& m, const Context& ctx) {
  m.allow({"type", "taus", "horizon", "step"});
  const Vec taus = as_numbers(m.doc(), m.get("taus"));
  const double horizon = m.number("horizon", 30.0);
  const double step = m.number("step", 1.0);
  return [ctx, taus, horizon, step](std::uint64_t seed, std::size_t count) {
    const auto fibers = fibers_for(ctx, seed, count);
    const SandwichReport rep = check_brackets(ctx.input.process, taus, horizon, step, fibers, ctx.input.limit);
    Outcome out{rep.passed, rep, {}};
    for (double tau : taus) {
      const BracketPair br = brackets(ctx.input.process, tau, horizon, step, ctx.input.limit);
      for (std::size_t i = 0; i < fibers.size(); ++i) {
        out.trace.add(i, tau, "a_tau", br.a_tau(fibers[i]));
        out.trace.add(i, tau, "b_tau", br.b_tau(fibers[i]));
      }
    }
    return out;
  };
}

Runner cascade_exp(Map& m, const Context& ctx) {
  m.allow({"type", "downstream", "samples", "horizon", "initial"});
  const Generator f1 = generator_of(m, ctx.system, "the upstream");
  const SystemModel down = parse_system(m.doc(), m.get("downstream"), ctx.time);
  const Generator f2 = generator_of(m, down, "downstream");
  if (ctx.system.output.output_dim() != f2.input_dim) {
    m.doc().fail(m.get("downstream"), "upstream output dimension differs from the downstream input");
  }
  const std::size_t n = f1.state_dim + f2.state_dim;
  const RandomVariable z = m.has("initial") ? parse_variable(m.doc(), m.get("initial"), n)
                                            : RandomVariable::cell(law::Uniform{Vec(n, -1.0), Vec(n, 1.0)},
                                                                   m.doc().next_stream());
  const std::size_t samples = m.count("samples", 200);
  const double horizon = static_cast<double>(m.count("horizon", 40));
  const OutputMap h1 = ctx.system.output;
  return [ctx, f1, f2, h1, z, samples, horizon](std::uint64_t seed, std::size_t count) {
    const Cascade c = cascade(f1, h1, f2);
    const auto fibers = fibers_for(ctx, seed, count);
    const auto times = time_grid(0, horizon, 1);
    CascadeCheckOptions o;
    o.samples = samples;
    o.seed = seed;
    o.t_max = horizon;
    const IdentityReport forward = check_cascade_identity(c, o);
    const IdentityReport pull = verify_cascade_pullback(c, z, ctx.input.process, times, fibers);
    json result{{"forward", forward}, {"pullback", pull}};
    bool passed = forward.passed && pull.passed;
    if (f1.input_dim == 0) {
      const RandomVariable x1 = map(z, f1.state_dim, [k = f1.state_dim](const Vec& v) {
        return Vec(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
      });
      const IdentityReport lemma = check_shift_lemma(f1, h1, x1, times, fibers);
      result["shift_lemma"] = lemma;
      passed = passed && lemma.passed;
    }
    Outcome out{passed, result, {}};
    const Process path = pullback_trajectory(c.combined, z, ctx.input.process);
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      for (double t : times) out.trace.add(i, t, "pullback", path(t, fibers[i]));
    }
    return out;
  };
}

struct LoopParts {
  FeedbackLoop loop;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

LoopParts loop_of(Map& m, const Context& ctx) {
  const Generator g1 = generator_of(m, ctx.system, "the system");
  const SystemModel partner = parse_system(m.doc(), m.get("partner"), ctx.time);
  const Generator g2 = generator_of(m, partner, "partner");
  try {
    return LoopParts{feedback(g1, ctx.system.output, g2, partner.output), g1.state_dim, g2.state_dim};
  } catch (const Error& e) {
    m.doc().fail(m.get("partner"), e.what());
  }
}

Runner feedback_exp(Map& m, const Context& ctx) {
  m.allow({"type", "partner", "steps", "initial", "axiom_samples"});
  const LoopParts parts = loop_of(m, ctx);
  const std::size_t n = parts.n1 + parts.n2;
  const RandomVariable z = m.has("initial") ? parse_variable(m.doc(), m.get("initial"), n)
                                            : RandomVariable::cell(law::Uniform{Vec(n, -1.0), Vec(n, 1.0)},
                                                                   m.doc().next_stream());
  const std::size_t steps = m.count("steps", 40);
  AxiomOptions ao;
  ao.samples = m.count("axiom_samples", 200);
  return [ctx, parts, z, steps, ao](std::uint64_t seed, std::size_t count) mutable {
    const auto fibers = fibers_for(ctx, seed, count);
    Outcome out;
    double worst = 0.0;
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      const Vec zi = z(fibers[i]);
      const Vec x1(zi.begin(), zi.begin() + static_cast<std::ptrdiff_t>(parts.n1));
      const Vec x2(zi.begin() + static_cast<std::ptrdiff_t>(parts.n1), zi.end());
      worst = std::max(worst, loop_equation_residual(parts.loop, steps, fibers[i], x1, x2));
      const LoopSignals sig = loop_signals(parts.loop, steps, fibers[i], x1, x2);
      for (std::size_t k = 0; k < steps; ++k) {
        const auto t = static_cast<double>(k);
        out.trace.add(i, t, "x1", sig.x1[k]);
        out.trace.add(i, t, "x2", sig.x2[k]);
        out.trace.add(i, t, "mu", sig.mu[k]);
        out.trace.add(i, t, "nu", sig.nu[k]);
      }
    }
    ao.seed = seed;
    const AxiomReport closed = check_axioms(parts.loop.closed, ao);
    out.passed = worst == 0.0 && closed.passed();
    out.result = json{{"loop_equation_residual", json_number(worst)}, {"steps", steps}, {"closed_axioms", closed}};
    return out;
  };
}

Runner small_gain(Map& m, const Context& ctx) {
  m.allow({"type", "partner", "burn_in", "window", "max_iters", "tol", "seed_input", "expect", "rate",
           "reconstruct_steps", "reconstruct_tol", "initial"});
  const LoopParts parts = loop_of(m, ctx);
  if (parts.loop.g1.input_dim != 1 || parts.loop.g2.input_dim != 1) {
    m.doc().fail(m.get("partner"), "small_gain supports scalar loop signals only");
  }
  const std::size_t burn_in = m.count("burn_in", 40);
  SmallGainOptions o;
  o.window = m.count("window", o.window);
  o.max_iters = m.count("max_iters", o.max_iters);
  o.tol = m.number("tol", o.tol);
  if (o.window <= 2 * burn_in * (o.max_iters + 1)) {
    m.doc().fail(m.node(), "window must exceed 2 * burn_in * (max_iters + 1)");
  }
  const RandomVariable seed_input =
      m.has("seed_input") ? parse_variable(m.doc(), m.get("seed_input"), 1) : RandomVariable::constant({0.0});
  const std::string expect = m.text("expect", "converge");
  if (expect != "converge" && expect != "period_two") m.doc().fail(m.get("expect"), "expect must be converge or period_two");
  std::optional<std::pair<double, double>> rate;
  if (m.has("rate")) {
    const Vec r = as_numbers(m.doc(), m.get("rate"));
    if (r.size() != 2) m.doc().fail(m.get("rate"), "rate takes [low, high]");
    rate = std::make_pair(r[0], r[1]);
  }
  const std::size_t steps = m.count("reconstruct_steps", 60);
  const double rtol = m.number("reconstruct_tol", 1e-4);
  const std::size_t n = parts.n1 + parts.n2;
  const RandomVariable z = m.has("initial") ? parse_variable(m.doc(), m.get("initial"), n)
                                            : RandomVariable::cell(law::Uniform{Vec(n, -2.0), Vec(n, 2.0)},
                                                                   m.doc().next_stream());
  return [ctx, parts, burn_in, o, seed_input, expect, rate, steps, rtol, z](std::uint64_t seed, std::size_t count) {
    const auto fibers = fibers_for(ctx, seed, count);
    const FeedbackLoop& loop = parts.loop;
    const TableMap T = compose_maps(output_characteristic_map(loop.g1, loop.h1, burn_in, Vec(parts.n1, 0.0)),
                                    output_characteristic_map(loop.g2, loop.h2, burn_in, Vec(parts.n2, 0.0)));
    const SmallGainReport rep = small_gain_iterate(T, seed_input, fibers, o);
    json result{{"iteration", rep}, {"expect", expect}};
    Outcome out{false, {}, rep.trace};
    if (expect == "period_two") {
      out.passed = rep.period_two;
    } else {
      bool ok = rep.converged;
      if (rate) ok = ok && rep.rate >= rate->first && rep.rate <= rate->second;
      double worst = 0.0;
      if (rep.converged) {
        const Process path = pullback_trajectory(loop.closed, z, Process::none(TimeKind::discrete));
        for (std::size_t i = 0; i < fibers.size(); ++i) {
          const LoopEquilibrium eq = reconstruct_equilibrium(loop, rep.fibers[i].table, fibers[i], burn_in,
                                                             Vec(parts.n1, 0.0), Vec(parts.n2, 0.0));
          const Vec target = concat(eq.x1, eq.x2);
          for (std::size_t k = 0; k <= steps; ++k) {
            const double r = max_abs_diff(path(static_cast<double>(k), fibers[i]), target);
            out.trace.add(i, static_cast<double>(k), "closed_loop_residual", 0, r);
            if (k == steps) worst = std::max(worst, r);
          }
        }
        result["closed_loop_residual"] = json_number(worst);
        result["reconstruct_tol"] = rtol;
        ok = ok && worst <= rtol;
      }
      out.passed = ok;
    }
    out.result = std::move(result);
    return out;
  };
}

}  // namespace

Runner parse_experiment(Doc& doc, const YAML::Node& n, const Context& ctx, std::string& kind) {
  Map m(doc, n, "experiment");
  kind = m.text("type");
  if (kind == "axioms") return axioms(m, ctx);
  if (kind == "roundtrip") return roundtrip(m, ctx);
  if (kind == "characteristic") return characteristic_exp(m, ctx);
  if (kind == "equilibrium") return equilibrium_exp(m, ctx);
  if (kind == "decay") return decay(m, ctx);
  if (kind == "monotone") return monotone(m, ctx);
  if (kind == "cics") return cics(m, ctx);
  if (kind == "brackets") return brackets_exp(m, ctx);
  if (kind == "cascade") return cascade_exp(m, ctx);
  if (kind == "feedback") return feedback_exp(m, ctx);
  if (kind == "small_gain") return small_gain(m, ctx);
  doc.fail(m.get("type"), "unknown experiment type '" + kind + "'");
}

}  // namespace rdsio::scenario::detail
