#include "rdsio/linear.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rdsio {

namespace {

// 10-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 5> kGlNode{0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                        0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kGlWeight{0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                          0.1494513491505806, 0.0666713443086881};

template <class F>
double gauss_legendre(double lo, double hi, F&& f) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < kGlNode.size(); ++i) {
    s += kGlWeight[i] * (f(c - h * kGlNode[i]) + f(c + h * kGlNode[i]));
  }
  return s * h;
}

// Calls piece(lo, hi) for consecutive pieces of [0, t] cut at the orbit's cell
// boundaries and at the given relative break points.
template <class F>
void for_each_piece(const Fiber& w, double t, const std::vector<double>& breaks, F&& piece) {
  double next_cell = std::floor(w.offset) + 1.0 - w.offset;
  auto br = breaks.begin();
  double pos = 0.0;
  while (pos < t) {
    while (next_cell <= pos) next_cell += 1.0;
    while (br != breaks.end() && *br <= pos) ++br;
    double end = std::min(t, next_cell);
    if (br != breaks.end()) end = std::min(end, *br);
    piece(pos, end);
    pos = end;
  }
}

double scalar_at(const RandomVariable& r, const Fiber& w, double s) { return r(shift(w, s))[0]; }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteError(std::string(what) + ": non-finite value");
}

double known_sup_abs(const RandomVariable& r) {
  if (!r.range()) return INFINITY;
  return r.range()->sup_norm();
}

}  // namespace

void validate(const LinearCoeffs& c) {
  if (c.a.arity() != 1 || c.b.arity() != 1) throw DimensionError("linear coefficients must be scalar");
  if (c.a.regularity() != Regularity::cell_constant || c.b.regularity() != Regularity::cell_constant) {
    throw Error("linear coefficients must be constant on noise cells");
  }
  if (c.lambda_hint && !(*c.lambda_hint > 0.0)) throw Error("lambda hint must be positive");
}

double expm1_ratio(double a, double w) {
  if (std::fabs(a) < 1e-8) return w + 0.5 * a * w * w;
  return std::expm1(a * w) / a;
}

double solve(const LinearCoeffs& c, double t, const Fiber& w, double x, const Process& u) {
  if (!(t >= 0.0)) throw Error("solve: time must be nonnegative");
  if (u.arity() != 1) throw DimensionError("solve: input must be scalar");
  const bool piecewise = u.regularity() == Regularity::cell_constant;
  for_each_piece(w, t, u.breaks(), [&](double lo, double hi) {
    const double width = hi - lo;
    const double mid = lo + 0.5 * width;
    const double ak = scalar_at(c.a, w, mid);
    const double bk = scalar_at(c.b, w, mid);
    double integral = 0.0;
    if (bk != 0.0) {
      if (piecewise) {
        integral = u(mid, w)[0] * expm1_ratio(ak, width);
      } else {
        integral = gauss_legendre(lo, hi, [&](double s) { return u(s, w)[0] * std::exp(ak * (hi - s)); });
      }
    }
    x = x * std::exp(ak * width) + bk * integral;
    require_finite(x, "solve");
  });
  return x;
}

SystemFlow linear_system(const LinearCoeffs& c, std::string name) {
  validate(c);
  return SystemFlow(
      TimeKind::continuous, 1, 1,
      [c](double t, const Fiber& w, const Vec& x, const Process& u) { return Vec{solve(c, t, w, x[0], u)}; },
      std::move(name));
}

CharacteristicValue characteristic(const LinearCoeffs& c, const RandomVariable& u, const Fiber& w,
                                   const CharacteristicOptions& opts) {
  validate(c);
  if (u.arity() != 1) throw DimensionError("characteristic: input must be scalar");
  if (!(opts.tol > 0.0)) throw Error("characteristic: tol must be positive");

  CharacteristicValue out;
  const double sup_a = c.a.range() ? c.a.range()->hi[0] : INFINITY;
  const double sup_bu = known_sup_abs(c.b) * known_sup_abs(u);
  if (sup_a < 0.0 && std::isfinite(sup_bu)) {
    out.certified = true;
    out.lambda = -sup_a;
  } else if (c.lambda_hint) {
    out.lambda = *c.lambda_hint;
  } else {
    double sum = 0.0;
    const std::size_t n = std::max<std::size_t>(opts.mean_window, 1);
    for (std::size_t k = 1; k <= n; ++k) sum += scalar_at(c.a, w, -static_cast<double>(k) + 0.5);
    out.lambda = -sum / static_cast<double>(n);
  }
  if (!(out.lambda > 0.0)) throw Error("characteristic: decay rate lambda is not positive; K(u) is not defined");

  const bool piecewise = u.regularity() == Regularity::cell_constant;
  double A = 0.0;  // int_s^0 a
  double value = 0.0;
  double seen_bu = std::isfinite(sup_bu) ? sup_bu : 0.0;
  double hi = 0.0;
  double cell = std::floor(w.offset) - w.offset;  // boundary at or below 0
  if (cell == 0.0) cell = -1.0;
  for (;;) {
    const double lo = cell;
    const double width = hi - lo;
    const double mid = lo + 0.5 * width;
    const double ak = scalar_at(c.a, w, mid);
    const double bk = scalar_at(c.b, w, mid);
    if (bk != 0.0) {
      if (piecewise) {
        const double uk = scalar_at(u, w, mid);
        value += bk * uk * std::exp(A) * expm1_ratio(ak, width);
        if (!std::isfinite(sup_bu)) seen_bu = std::max(seen_bu, std::fabs(bk * uk));
      } else {
        value += bk * gauss_legendre(lo, hi, [&](double s) {
                   const double us = scalar_at(u, w, s);
                   if (!std::isfinite(sup_bu)) seen_bu = std::max(seen_bu, std::fabs(bk * us));
                   return us * std::exp(A + ak * (hi - s));
                 });
      }
    }
    A += ak * width;
    require_finite(value, "characteristic");
    hi = lo;
    cell -= 1.0;
    out.truncation = -hi;
    out.tail_bound = std::exp(A) * seen_bu / out.lambda;
    if (out.tail_bound <= opts.tol || out.truncation >= opts.max_truncation) break;
  }
  out.value = value;
  return out;
}

RandomVariable characteristic_rv(const LinearCoeffs& c, const RandomVariable& u, const CharacteristicOptions& opts) {
  validate(c);
  return RandomVariable(1, [c, u, opts](const Fiber& w) { return Vec{characteristic(c, u, w, opts).value}; });
}

L2Report check_L2(const LinearCoeffs& c, double lambda, const std::vector<Fiber>& fibers, const L2Options& opts) {
  validate(c);
  if (!(lambda > 0.0)) throw Error("check_L2: lambda must be positive");
  if (opts.reach < 2) throw Error("check_L2: reach must be at least 2");
  L2Report rep;
  rep.lambda = lambda;
  const auto H = static_cast<std::int64_t>(std::ceil(opts.horizon));
  const auto R = static_cast<std::int64_t>(opts.reach);
  double sum_a = 0.0;
  std::size_t count_a = 0;

  for (const Fiber& w : fibers) {
    const std::int64_t c0 = cell_index(w.offset);
    // Q[i] = sum over cells -H .. -H+i-1 of (a + lambda), at cell boundaries.
    const std::size_t n = static_cast<std::size_t>(2 * H + R + 1);
    std::vector<double> Q(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = c.a.scalar(Fiber{w.seed, static_cast<double>(c0 - H + static_cast<std::int64_t>(i)) + 0.5});
      sum_a += a;
      ++count_a;
      Q[i + 1] = Q[i] + a + lambda;
    }
    L2Fiber f;
    std::vector<double> times, gammas;
    for (std::int64_t k = 0; k <= 2 * H; ++k) {
      const auto base = static_cast<std::size_t>(k);
      double near = -INFINITY;
      double far = -INFINITY;
      for (std::int64_t r = 0; r <= R; ++r) {
        const double q = Q[base + static_cast<std::size_t>(r)] - Q[base];
        if (2 * r <= R) {
          near = std::max(near, q);
        } else {
          far = std::max(far, q);
        }
      }
      if (far > near) ++f.unsettled;
      const double gamma = std::exp(std::max(near, far));
      f.gamma_max = std::max(f.gamma_max, gamma);
      times.push_back(static_cast<double>(c0 - H + k) - w.offset);
      gammas.push_back(gamma);
    }
    if (std::all_of(gammas.begin(), gammas.end(), [](double g) { return std::isfinite(g); })) {
      f.gamma_growth = temperedness_from_samples(times, gammas, opts.gammas);
    }
    f.passed = f.unsettled == 0 && f.gamma_growth.tempered_consistent;
    if (!f.passed) ++rep.failed_fibers;
    rep.fibers.push_back(std::move(f));
  }
  rep.mean_a = count_a > 0 ? sum_a / static_cast<double>(count_a) : NAN;
  rep.passed = !fibers.empty() && rep.failed_fibers == 0;
  return rep;
}

namespace {

Process bounded_input(Sampler& s, double bound) {
  if (s.coin()) return Process::constant({s.uniform(-bound, bound)}, TimeKind::continuous);
  return stationary(RandomVariable::cell(law::Uniform{{-bound}, {bound}}, s.bits()), TimeKind::continuous);
}

}  // namespace

BoundedFlowReport check_bounded_flow(const LinearCoeffs& c, const std::vector<Fiber>& fibers, double horizon,
                                     const BoundedFlowOptions& opts) {
  return check_bounded_flow(c, linear_system(c), fibers, horizon, opts);
}

BoundedFlowReport check_bounded_flow(const LinearCoeffs& c, const SystemFlow& flow,
                                     const std::vector<Fiber>& fibers, double horizon,
                                     const BoundedFlowOptions& opts) {
  validate(c);
  if (flow.state_dim() != 1 || flow.input_dim() != 1) throw DimensionError("check_bounded_flow: scalar flow required");
  BoundedFlowReport rep;
  Sampler s(opts.seed, 0xb0b0ULL);
  const std::vector<double> grid = time_grid(0.0, horizon, opts.step);
  for (const Fiber& w : fibers) {
    double M = -INFINITY;
    double B = 0.0;
    for (double r = std::floor(w.offset) - w.offset; r < horizon + 1.0; r += 1.0) {
      const Fiber at = shift(w, r + 0.5);
      M = std::max(M, c.a.scalar(at));
      B = std::max(B, std::fabs(c.b.scalar(at)));
    }
    for (std::size_t k = 0; k < opts.samples_per_fiber; ++k) {
      const double x = s.uniform(-opts.state_bound, opts.state_bound);
      const Process u = bounded_input(s, opts.input_bound);
      for (double t : grid) {
        const double v = std::fabs(flow(t, w, {x}, u)[0]);
        const double bound = std::fabs(x) * std::exp(M * t) + B * opts.input_bound * expm1_ratio(M, t);
        const double excess = v - bound;
        ++rep.checked;
        if (excess > 1e-12 * std::max(1.0, bound)) ++rep.violations;
        rep.worst_excess = std::max(rep.worst_excess, excess);
      }
    }
  }
  rep.passed = rep.checked > 0 && rep.violations == 0;
  return rep;
}

SystemFlow linear_pair_flow(const LinearCoeffs& up, const RandomVariable& gain, const LinearCoeffs& down) {
  validate(up);
  validate(down);
  if (gain.arity() != 1 || gain.regularity() != Regularity::cell_constant) {
    throw Error("linear_pair_flow: gain must be a scalar cell-constant variable");
  }
  return SystemFlow(
      TimeKind::continuous, 2, 1,
      [up, gain, down](double t, const Fiber& w, const Vec& x, const Process& u) {
        if (u.regularity() != Regularity::cell_constant) {
          throw Error("linear_pair_flow: input must be constant on noise cells");
        }
        double x1 = x[0];
        double x2 = x[1];
        for_each_piece(w, t, u.breaks(), [&](double lo, double hi) {
          const double width = hi - lo;
          const Fiber at = shift(w, lo + 0.5 * width);
          const double a1 = up.a.scalar(at);
          const double b1 = up.b.scalar(at);
          const double a2 = down.a.scalar(at);
          const double b2 = down.b.scalar(at);
          const double g = gain.scalar(at);
          const double uk = u(lo + 0.5 * width, w)[0];
          const double e2 = std::exp(a2 * width);
          const double cross = e2 * expm1_ratio(a1 - a2, width);
          // int_0^width E(a1, r) e^{a2 (width - r)} dr
          const double forced = std::fabs(a1) >= 1e-6
                                    ? (cross - expm1_ratio(a2, width)) / a1
                                    : gauss_legendre(0.0, width, [&](double r) {
                                        return expm1_ratio(a1, r) * std::exp(a2 * (width - r));
                                      });
          x2 = x2 * e2 + b2 * g * (x1 * cross + b1 * uk * forced);
          x1 = x1 * std::exp(a1 * width) + b1 * uk * expm1_ratio(a1, width);
          require_finite(x1, "linear_pair_flow");
          require_finite(x2, "linear_pair_flow");
        });
        return Vec{x1, x2};
      },
      "linear-pair");
}

void to_json(nlohmann::json& j, const CharacteristicValue& v) {
  j = nlohmann::json{{"value", json_number(v.value)},
                     {"truncation", json_number(v.truncation)},
                     {"tail_bound", json_number(v.tail_bound)},
                     {"lambda", json_number(v.lambda)},
                     {"certified", v.certified}};
}

void to_json(nlohmann::json& j, const L2Report& r) {
  nlohmann::json fibers = nlohmann::json::array();
  for (const auto& f : r.fibers) {
    fibers.push_back({{"gamma_max", json_number(f.gamma_max)},
                      {"unsettled", f.unsettled},
                      {"gamma_growth", f.gamma_growth},
                      {"passed", f.passed}});
  }
  j = nlohmann::json{{"lambda", json_number(r.lambda)},
                     {"mean_a", json_number(r.mean_a)},
                     {"failed_fibers", r.failed_fibers},
                     {"passed", r.passed},
                     {"fibers", fibers}};
}

void to_json(nlohmann::json& j, const BoundedFlowReport& r) {
  j = nlohmann::json{{"checked", r.checked},
                     {"violations", r.violations},
                     {"worst_excess", json_number(r.worst_excess)},
                     {"passed", r.passed}};
}

}  // namespace rdsio
