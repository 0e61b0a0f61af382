#include "rdsio/tempered.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rdsio {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("fit_slope: need at least two paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

TemperedReport temperedness_from_samples(const std::vector<double>& times, const std::vector<double>& norms,
                                         const std::vector<double>& gammas) {
  if (gammas.empty()) throw Error("temperedness: gammas must be nonempty");
  for (double g : gammas) {
    if (!(g > 0.0)) throw Error("temperedness: gammas must be positive");
  }
  if (times.size() != norms.size() || times.size() < 4) throw Error("temperedness: need at least 4 samples");
  for (double v : norms) {
    if (!std::isfinite(v)) throw NonFiniteError("temperedness: non-finite sample");
  }

  TemperedReport rep;
  rep.gammas = gammas;
  for (double g : gammas) {
    double score = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) score = std::max(score, norms[i] * std::exp(-g * std::abs(times[i])));
    rep.scores.push_back(score);
  }

  // Running max of the norm as a function of |s|.
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(times[a]) < std::abs(times[b]); });
  const double radius = std::abs(times[order.back()]);
  std::vector<double> xs;
  std::vector<double> ys;
  double running = 0.0;
  for (std::size_t k : order) {
    running = std::max(running, norms[k]);
    const double rho = std::abs(times[k]);
    if (rho >= 0.25 * radius) {
      xs.push_back(rho);
      ys.push_back(std::log1p(running));
    }
  }
  rep.max_norm = running;
  rep.growth_slope = xs.size() >= 2 && xs.front() != xs.back() ? fit_slope(xs, ys) : 0.0;
  const double min_gamma = *std::min_element(gammas.begin(), gammas.end());
  rep.tempered_consistent = rep.growth_slope < min_gamma;
  return rep;
}

TemperedReport temperedness_report(const RandomVariable& r, const Fiber& w, const TemperedOptions& opts) {
  if (!(opts.horizon > 0.0)) throw Error("temperedness: horizon must be positive");
  if (!(opts.step > 0.0)) throw Error("temperedness: step must be positive");
  std::vector<double> times;
  std::vector<double> norms;
  const auto n = static_cast<long>(std::floor(opts.horizon / opts.step));
  for (long k = -n; k <= n; ++k) {
    const double s = static_cast<double>(k) * opts.step;
    const Vec v = r(shift(w, s));
    if (!all_finite(v)) throw NonFiniteError("temperedness: non-finite sample at s = " + std::to_string(s));
    times.push_back(s);
    norms.push_back(sup_norm(v));
  }
  return temperedness_from_samples(times, norms, opts.gammas);
}

}  // namespace rdsio
