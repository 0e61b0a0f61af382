#include "rdsio/process.hpp"

#include <algorithm>
#include <cmath>

namespace rdsio {

namespace {

std::vector<double> normalized(std::vector<double> breaks) {
  std::erase_if(breaks, [](double b) { return !(b > 0.0) || !std::isfinite(b); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

void require_integer_time(TimeKind kind, double s, const char* what) {
  if (kind == TimeKind::discrete && std::floor(s) != s) {
    throw Error(std::string(what) + ": discrete time requires an integer shift");
  }
}

}  // namespace

Process::Process(std::size_t arity, TimeKind kind, Eval eval, Regularity regularity, std::vector<double> breaks)
    : arity_(arity),
      kind_(kind),
      eval_(std::make_shared<const Eval>(std::move(eval))),
      regularity_(regularity),
      breaks_(normalized(std::move(breaks))) {}

Process Process::constant(Vec value, TimeKind kind) {
  const std::size_t n = value.size();
  return Process(
      n, kind, [value = std::move(value)](double, const Fiber&) { return value; }, Regularity::cell_constant);
}

Process rho(const Process& q, double s) {
  if (!(s >= 0.0)) throw Error("rho: shift must be nonnegative");
  require_integer_time(q.time_kind(), s, "rho");
  std::vector<double> breaks;
  for (double b : q.breaks()) breaks.push_back(b - s);
  return Process(
      q.arity(), q.time_kind(), [q, s](double t, const Fiber& w) { return q(t + s, shift(w, -s)); },
      q.regularity(), std::move(breaks));
}

Process concat(const Process& u, const Process& v, double s) {
  if (u.arity() != v.arity()) throw DimensionError("concat: arity mismatch");
  if (u.time_kind() != v.time_kind()) throw Error("concat: time kind mismatch");
  if (!(s >= 0.0)) throw Error("concat: splice time must be nonnegative");
  require_integer_time(u.time_kind(), s, "concat");
  std::vector<double> breaks;
  for (double b : u.breaks()) {
    if (b < s) breaks.push_back(b);
  }
  // v is read along theta_s w, whose cell grid coincides with that of w.
  if (s > 0.0) breaks.push_back(s);
  for (double b : v.breaks()) breaks.push_back(b + s);
  return Process(
      u.arity(), u.time_kind(),
      [u, v, s](double t, const Fiber& w) { return t < s ? u(t, w) : v(t - s, shift(w, s)); },
      combine(u.regularity(), v.regularity()), std::move(breaks));
}

Process pullback(const Process& q) {
  return Process(q.arity(), q.time_kind(), [q](double t, const Fiber& w) { return q(t, shift(w, -t)); });
}

Process operator+(const Process& p, const Process& q) {
  if (p.arity() != q.arity()) throw DimensionError("process +: arity mismatch");
  if (p.time_kind() != q.time_kind()) throw Error("process +: time kind mismatch");
  std::vector<double> breaks = p.breaks();
  breaks.insert(breaks.end(), q.breaks().begin(), q.breaks().end());
  return Process(
      p.arity(), p.time_kind(), [p, q](double t, const Fiber& w) { return add(p(t, w), q(t, w)); },
      combine(p.regularity(), q.regularity()), std::move(breaks));
}

StationaryProcess::StationaryProcess(RandomVariable base, TimeKind kind)
    : base_(base),
      process_(
          base.arity(), kind, [base](double t, const Fiber& w) { return base(shift(w, t)); },
          base.regularity()) {}

RandomVariable at_time_zero(const Process& q) {
  return RandomVariable(q.arity(), [q](const Fiber& w) { return q(0.0, w); }, q.regularity());
}

double max_distance(const Process& p, const Process& q, const std::vector<double>& times,
                    const std::vector<Fiber>& fibers) {
  double m = 0.0;
  for (const Fiber& w : fibers) {
    for (double t : times) m = std::max(m, max_abs_diff(p(t, w), q(t, w)));
  }
  return m;
}

bool is_stationary_on(const Process& q, const std::vector<double>& shifts, const std::vector<double>& times,
                      const std::vector<Fiber>& fibers, double tol) {
  for (double s : shifts) {
    const Process shifted_q = rho(q, s);
    for (const Fiber& w : fibers) {
      for (double t : times) {
        const Vec a = shifted_q(t, w);
        const Vec b = q(t, w);
        if (tol == 0.0 ? a != b : max_abs_diff(a, b) > tol) return false;
      }
    }
  }
  return true;
}

std::vector<double> time_grid(double t0, double t1, double step) {
  if (!(step > 0.0)) throw Error("time_grid: step must be positive");
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((t1 - t0) / step + 1e-9));
  for (long k = 0; k <= n; ++k) grid.push_back(t0 + static_cast<double>(k) * step);
  if (grid.empty() || grid.back() < t1 - 1e-12) grid.push_back(t1);
  return grid;
}

}  // namespace rdsio
