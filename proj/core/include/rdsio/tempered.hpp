#pragma once

#include <vector>

#include "rdsio/random_variable.hpp"

namespace rdsio {

struct TemperedOptions {
  std::vector<double> gammas{0.05, 0.1, 0.5};
  /// Orbit window [-horizon, horizon].
  double horizon = 200.0;
  double step = 1.0;
};

/// Growth diagnostic for s -> ||r(theta_s w)||. Temperedness quantifies over
/// the whole orbit, so a finite window can only be consistent with it.
struct TemperedReport {
  std::vector<double> gammas;
  /// max over the window of ||r(theta_s w)|| exp(-gamma |s|), one per gamma.
  std::vector<double> scores;
  /// Slope of log(1 + running max of the norm) against |s| on the outer
  /// three quarters of the window.
  double growth_slope = 0.0;
  double max_norm = 0.0;
  bool tempered_consistent = false;
};

TemperedReport temperedness_report(const RandomVariable& r, const Fiber& w, const TemperedOptions& opts);

/// Same diagnostic on precomputed samples (orbit times and norms).
TemperedReport temperedness_from_samples(const std::vector<double>& times, const std::vector<double>& norms,
                                         const std::vector<double>& gammas);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rdsio
