#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "rdsio/fiber.hpp"
#include "rdsio/noise.hpp"
#include "rdsio/types.hpp"

namespace rdsio {

/// How a value read along an orbit, s -> r(theta_s w), behaves between the
/// integer noise-cell boundaries of the orbit.
enum class Regularity {
  cell_constant,  ///< constant on every cell; grid evaluation is exact
  cell_smooth,    ///< smooth inside cells, possibly discontinuous at boundaries
};

/// Combined regularity of two operands.
inline Regularity combine(Regularity a, Regularity b) {
  return (a == Regularity::cell_constant && b == Regularity::cell_constant) ? Regularity::cell_constant
                                                                           : Regularity::cell_smooth;
}

/// A deterministic map Fiber -> R^n. Immutable and cheap to copy.
class RandomVariable {
 public:
  using Eval = std::function<Vec(const Fiber&)>;

  RandomVariable(std::size_t arity, Eval eval, Regularity regularity = Regularity::cell_smooth,
                 std::optional<Box> range = std::nullopt);

  Vec operator()(const Fiber& w) const { return (*eval_)(w); }
  /// Convenience for scalar variables.
  double scalar(const Fiber& w) const { return (*eval_)(w)[0]; }

  std::size_t arity() const { return arity_; }
  Regularity regularity() const { return regularity_; }
  /// Known essential range, when the construction provides one.
  const std::optional<Box>& range() const { return range_; }

  static RandomVariable constant(Vec value);
  /// Reads the noise cell containing the fiber's offset.
  static RandomVariable cell(const CellNoise& noise);
  static RandomVariable cell(CellLaw law, std::uint64_t stream) { return cell(CellNoise(std::move(law), stream)); }

 private:
  std::size_t arity_;
  std::shared_ptr<const Eval> eval_;
  Regularity regularity_;
  std::optional<Box> range_;
};

RandomVariable operator+(const RandomVariable& a, const RandomVariable& b);
RandomVariable operator-(const RandomVariable& a, const RandomVariable& b);
/// Scalar variable times a vector-valued one.
RandomVariable operator*(const RandomVariable& scalar, const RandomVariable& r);
RandomVariable operator*(double c, const RandomVariable& r);

/// Pointwise image under a deterministic map. Regularity is inherited.
RandomVariable map(const RandomVariable& r, std::size_t arity, std::function<Vec(const Vec&)> f);

/// Component-wise (a, b) stacked into one variable.
RandomVariable stack(const RandomVariable& a, const RandomVariable& b);

/// Randomly shifted variable w -> r(theta_s w).
RandomVariable shifted(const RandomVariable& r, double s);

}  // namespace rdsio
