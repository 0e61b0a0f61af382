#include "rdsio/random_variable.hpp"

#include <algorithm>
#include <cmath>

namespace rdsio {

namespace {

std::optional<Box> sum_range(const std::optional<Box>& a, const std::optional<Box>& b, double sign) {
  if (!a || !b) return std::nullopt;
  Box r = *a;
  for (std::size_t i = 0; i < r.dim(); ++i) {
    if (sign > 0) {
      r.lo[i] = a->lo[i] + b->lo[i];
      r.hi[i] = a->hi[i] + b->hi[i];
    } else {
      r.lo[i] = a->lo[i] - b->hi[i];
      r.hi[i] = a->hi[i] - b->lo[i];
    }
  }
  return r;
}

std::optional<Box> product_range(const std::optional<Box>& s, const std::optional<Box>& r) {
  if (!s || !r) return std::nullopt;
  Box out = *r;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    const double c[4] = {s->lo[0] * r->lo[i], s->lo[0] * r->hi[i], s->hi[0] * r->lo[i],
                         s->hi[0] * r->hi[i]};
    if (std::any_of(std::begin(c), std::end(c), [](double x) { return std::isnan(x); })) return std::nullopt;
    out.lo[i] = *std::min_element(std::begin(c), std::end(c));
    out.hi[i] = *std::max_element(std::begin(c), std::end(c));
  }
  return out;
}

}  // namespace

RandomVariable::RandomVariable(std::size_t arity, Eval eval, Regularity regularity, std::optional<Box> range)
    : arity_(arity),
      eval_(std::make_shared<const Eval>(std::move(eval))),
      regularity_(regularity),
      range_(std::move(range)) {
  if (range_ && range_->dim() != arity_) throw DimensionError("RandomVariable: range dimension mismatch");
}

RandomVariable RandomVariable::constant(Vec value) {
  const std::size_t n = value.size();
  Box range{value, value};
  return RandomVariable(
      n, [value = std::move(value)](const Fiber&) { return value; }, Regularity::cell_constant,
      std::move(range));
}

RandomVariable RandomVariable::cell(const CellNoise& noise) {
  return RandomVariable(
      noise.dim(), [noise](const Fiber& w) { return noise.value(w.seed, cell_index(w.offset)); },
      Regularity::cell_constant, noise.range());
}

RandomVariable operator+(const RandomVariable& a, const RandomVariable& b) {
  if (a.arity() != b.arity()) throw DimensionError("RandomVariable +: arity mismatch");
  return RandomVariable(
      a.arity(), [a, b](const Fiber& w) { return add(a(w), b(w)); },
      combine(a.regularity(), b.regularity()), sum_range(a.range(), b.range(), 1.0));
}

RandomVariable operator-(const RandomVariable& a, const RandomVariable& b) {
  if (a.arity() != b.arity()) throw DimensionError("RandomVariable -: arity mismatch");
  return RandomVariable(
      a.arity(), [a, b](const Fiber& w) { return sub(a(w), b(w)); },
      combine(a.regularity(), b.regularity()), sum_range(a.range(), b.range(), -1.0));
}

RandomVariable operator*(const RandomVariable& s, const RandomVariable& r) {
  if (s.arity() != 1) throw DimensionError("RandomVariable *: left operand must be scalar");
  return RandomVariable(
      r.arity(), [s, r](const Fiber& w) { return scale(s.scalar(w), r(w)); },
      combine(s.regularity(), r.regularity()), product_range(s.range(), r.range()));
}

RandomVariable operator*(double c, const RandomVariable& r) { return RandomVariable::constant({c}) * r; }

RandomVariable map(const RandomVariable& r, std::size_t arity, std::function<Vec(const Vec&)> f) {
  return RandomVariable(
      arity, [r, f = std::move(f)](const Fiber& w) { return f(r(w)); }, r.regularity());
}

RandomVariable stack(const RandomVariable& a, const RandomVariable& b) {
  std::optional<Box> range;
  if (a.range() && b.range()) {
    range = Box{concat(a.range()->lo, b.range()->lo), concat(a.range()->hi, b.range()->hi)};
  }
  return RandomVariable(
      a.arity() + b.arity(), [a, b](const Fiber& w) { return concat(a(w), b(w)); },
      combine(a.regularity(), b.regularity()), std::move(range));
}

RandomVariable shifted(const RandomVariable& r, double s) {
  // A fractional shift moves the cell boundaries off the orbit's grid.
  const Regularity reg = std::floor(s) == s ? r.regularity() : Regularity::cell_smooth;
  return RandomVariable(
      r.arity(), [r, s](const Fiber& w) { return r(shift(w, s)); }, reg, r.range());
}

}  // namespace rdsio
