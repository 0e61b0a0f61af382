#pragma once

// Small model systems shared by the unit and acceptance tests.

#include <algorithm>

#include <rdsio/rdsio.hpp>

namespace models {

using namespace rdsio;

inline RandomVariable uniform_cells(double lo, double hi, std::uint64_t stream) {
  return RandomVariable::cell(law::Uniform{{lo}, {hi}}, stream);
}

// f(w, x, u) = x / 2 + n(w) + u with n uniform on [-1, 1].
inline Generator affine_noisy(std::uint64_t stream = 101) {
  const RandomVariable n = uniform_cells(-1.0, 1.0, stream);
  return Generator{1, 1, [n](const Fiber& w, const Vec& x, const Vec& u) { return Vec{0.5 * x[0] + n.scalar(w) + u[0]}; }};
}

inline Generator half_plus_input() {
  return Generator{1, 1, [](const Fiber&, const Vec& x, const Vec& u) { return Vec{0.5 * x[0] + u[0]}; }};
}

// Two-dimensional generator with a noisy contraction and nonlinear input.
inline Generator planar_noisy(std::uint64_t stream = 202) {
  const RandomVariable a = RandomVariable::cell(law::Uniform{{-0.8, 0.1}, {0.8, 0.6}}, stream);
  return Generator{2, 1, [a](const Fiber& w, const Vec& x, const Vec& u) {
                     const Vec c = a(w);
                     return Vec{c[0] * x[0] - 0.3 * x[1] + std::tanh(u[0]), c[1] * x[1] + 0.2 * x[0] * x[0] / (1 + x[0] * x[0])};
                   }};
}

inline LinearCoeffs random_linear(double lo = -2.0, double hi = -0.5, std::uint64_t stream = 303) {
  return LinearCoeffs{uniform_cells(lo, hi, stream), RandomVariable::constant({1.0}), std::nullopt};
}

inline LinearCoeffs constant_linear(double a, double b) {
  return LinearCoeffs{RandomVariable::constant({a}), RandomVariable::constant({b}), std::nullopt};
}

// x' = alpha x + (1 - alpha) k u + n: an averaging filter with DC gain k.
inline Generator mixing(double k, const RandomVariable& alpha, const RandomVariable& noise) {
  return Generator{1, 1, [k, alpha, noise](const Fiber& w, const Vec& x, const Vec& u) {
                     const double a = alpha.scalar(w);
                     return Vec{a * x[0] + (1 - a) * k * u[0] + noise.scalar(w)};
                   }};
}

inline OutputMap linear_output(double g) {
  return OutputMap(1, 1, [g](const Fiber&, const Vec& x) { return Vec{g * x[0]}; });
}

// Loop whose composed output characteristic has gain 0.5.
inline FeedbackLoop contractive_loop() {
  return feedback(mixing(1, uniform_cells(0.1, 0.4, 401), uniform_cells(-1, 1, 402)), linear_output(-1),
                  mixing(1, uniform_cells(0.1, 0.4, 403), uniform_cells(-1, 1, 404)), linear_output(0.5));
}

// Loop with gain 1.5 through a saturation; the composed map has a 2-cycle near +-1.
inline FeedbackLoop saturated_loop() {
  const OutputMap sat(1, 1, [](const Fiber&, const Vec& x) { return Vec{std::clamp(-1.5 * x[0], -1.0, 1.0)}; });
  return feedback(mixing(1, uniform_cells(0.1, 0.4, 405), uniform_cells(-0.05, 0.05, 406)), sat,
                  mixing(1, uniform_cells(0.1, 0.4, 407), RandomVariable::constant({0.0})), linear_output(1));
}

}  // namespace models
