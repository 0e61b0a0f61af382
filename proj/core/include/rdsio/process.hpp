#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rdsio/random_variable.hpp"

namespace rdsio {

/// A theta-stochastic process (t, w) -> R^n over nonnegative times. In
/// discrete time only integer t is meaningful.
///
/// For continuous time the process also carries integration hints used by
/// exact flows: its regularity between orbit cell boundaries, and any extra
/// relative times where it may jump (introduced by concatenation).
class Process {
 public:
  using Eval = std::function<Vec(double t, const Fiber& w)>;

  Process(std::size_t arity, TimeKind kind, Eval eval, Regularity regularity = Regularity::cell_smooth,
          std::vector<double> breaks = {});

  Vec operator()(double t, const Fiber& w) const { return (*eval_)(t, w); }

  std::size_t arity() const { return arity_; }
  TimeKind time_kind() const { return kind_; }
  Regularity regularity() const { return regularity_; }
  /// Sorted relative times in (0, inf) where the process may jump off-grid.
  const std::vector<double>& breaks() const { return breaks_; }

  /// The trivial process c(value).
  static Process constant(Vec value, TimeKind kind);
  /// The empty input used by systems without inputs.
  static Process none(TimeKind kind) { return constant({}, kind); }

 private:
  std::size_t arity_;
  TimeKind kind_;
  std::shared_ptr<const Eval> eval_;
  Regularity regularity_;
  std::vector<double> breaks_;
};

/// Shift operator: (rho_s q)_t(w) = q_{t+s}(theta_{-s} w).
Process rho(const Process& q, double s);

/// Concatenation u <>_s v: u on [0, s), then v_{t-s}(theta_s w).
Process concat(const Process& u, const Process& v, double s);

/// Pullback: q^_t(w) = q_t(theta_{-t} w).
Process pullback(const Process& q);

/// Pointwise sum of two processes of equal arity and time kind.
Process operator+(const Process& p, const Process& q);

/// A theta-stationary process q_t(w) = q(theta_t w) together with the random
/// variable that generates it.
class StationaryProcess {
 public:
  StationaryProcess(RandomVariable base, TimeKind kind);

  const RandomVariable& base() const { return base_; }
  const Process& process() const { return process_; }
  operator const Process&() const { return process_; }  // NOLINT(google-explicit-constructor)

 private:
  RandomVariable base_;
  Process process_;
};

inline StationaryProcess stationary(RandomVariable q, TimeKind kind) {
  return StationaryProcess(std::move(q), kind);
}

/// The random variable q(w) := q_0(w) read off a process at time zero.
RandomVariable at_time_zero(const Process& q);

/// Largest coordinate difference between two processes over a time grid and
/// a set of fibers.
double max_distance(const Process& p, const Process& q, const std::vector<double>& times,
                    const std::vector<Fiber>& fibers);

/// Whether rho_s(q) agrees with q on the sampled (s, t, w) within `tol`
/// (exact comparison when tol == 0).
bool is_stationary_on(const Process& q, const std::vector<double>& shifts, const std::vector<double>& times,
                      const std::vector<Fiber>& fibers, double tol);

/// Uniform time grid {t0, t0 + step, ..., <= t1}; the endpoint is included.
std::vector<double> time_grid(double t0, double t1, double step);

}  // namespace rdsio
