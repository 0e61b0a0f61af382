#include "rdsio/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace rdsio {

namespace {

Process input_process(const SystemFlow& sys, const std::optional<RandomVariable>& input) {
  if (!input) {
    if (sys.input_dim() != 0) throw DimensionError("equilibrium: system has inputs but the candidate has none");
    return Process::none(sys.time_kind());
  }
  return stationary(*input, sys.time_kind()).process();
}

}  // namespace

EquilibriumReport check_equilibrium(const SystemFlow& sys, const EquilibriumCandidate& cand,
                                    const std::vector<double>& times, const std::vector<Fiber>& fibers, double tol) {
  const Process u = input_process(sys, cand.input);
  const Process path = pullback_trajectory(sys, cand.state, u);
  EquilibriumReport rep;
  rep.tol = tol;
  for (const Fiber& w : fibers) {
    const Vec x = cand.state(w);
    for (double t : times) {
      const double r = max_abs_diff(path(t, w), x);
      ++rep.checked;
      if (!(r <= rep.max_residual)) {
        rep.max_residual = std::isnan(r) ? INFINITY : r;
        rep.worst_fiber = w;
        rep.worst_t = t;
      }
    }
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

CharacteristicEstimate estimate_characteristic(const SystemFlow& sys, const RandomVariable& u,
                                               const RandomVariable& x0, const std::vector<Fiber>& fibers,
                                               const EstimateOptions& opts) {
  if (!(opts.horizon > 0.0)) throw Error("estimate_characteristic: horizon must be positive");
  if (!(opts.tol > 0.0)) throw Error("estimate_characteristic: tol must be positive");
  require_dim(Vec(u.arity()), sys.input_dim(), "estimate_characteristic input");
  const double T = sys.time_kind() == TimeKind::discrete ? std::ceil(opts.horizon) : opts.horizon;
  const double step = sys.time_kind() == TimeKind::discrete ? std::max(1.0, std::round(opts.step)) : opts.step;
  const Process ubar = stationary(u, sys.time_kind()).process();
  const Process path = pullback_trajectory(sys, x0, ubar);

  CharacteristicEstimate out{RandomVariable(
                                 sys.state_dim(), [path, T](const Fiber& w) { return path(T, w); }),
                             {}, {}};
  ConvergenceReport& rep = out.report;
  rep.label = "characteristic";
  rep.tol = opts.tol;

  std::vector<double> grid = time_grid(0.0, T, step);
  std::vector<Fiber> converged;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const Fiber& w = fibers[i];
    std::vector<Vec> values;
    values.reserve(grid.size());
    for (double t : grid) values.push_back(path(t, w));
    const Vec& last = values.back();

    FiberConvergence fc;
    fc.fiber_id = i;
    fc.limit = last;
    fc.final_state = last;
    std::vector<double> ts, logs;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = max_abs_diff(values[k], last);
      if (grid[k] >= T / 2) fc.final_residual = std::max(fc.final_residual, d);
      rep.trace.add(i, grid[k], "pullback", values[k]);
      if (grid[k] < T / 2 && d > 0.0 && std::isfinite(d)) {
        ts.push_back(grid[k]);
        logs.push_back(std::log(d));
      }
    }
    fc.decay_slope = ts.size() >= 2 ? fit_slope(ts, logs) : NAN;
    fc.converged = fc.final_residual <= opts.tol;
    if (fc.converged) converged.push_back(w);
    rep.fibers.push_back(std::move(fc));
  }
  rep.finalize();

  out.equilibrium = check_equilibrium(sys, EquilibriumCandidate{out.estimate, u},
                                      time_grid(0.0, opts.equilibrium_span, step), converged, 10.0 * opts.tol);
  if (converged.size() != fibers.size()) {
    rep.notes.push_back(std::to_string(fibers.size() - converged.size()) + " fiber(s) did not converge");
  }
  return out;
}

void to_json(nlohmann::json& j, const EquilibriumReport& r) {
  j = nlohmann::json{{"max_residual", json_number(r.max_residual)},
                     {"worst_fiber", {{"seed", r.worst_fiber.seed}, {"offset", r.worst_fiber.offset}}},
                     {"worst_t", r.worst_t},
                     {"tol", json_number(r.tol)},
                     {"checked", r.checked},
                     {"passed", r.passed}};
}

}  // namespace rdsio
