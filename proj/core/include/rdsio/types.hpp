#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdsio {

/// Points of the state, input and output spaces (boxes in R^n).
using Vec = std::vector<double>;

enum class TimeKind { discrete, continuous };

const char* to_string(TimeKind kind);

/// Raised on contract violations (dimension mismatch, bad preconditions).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a computation produces NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box; bounds may be infinite.
struct Box {
  Vec lo;
  Vec hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(const Vec& x) const;
  /// Largest absolute coordinate value attainable in the box.
  double sup_norm() const;
};

Box unbounded_box(std::size_t dim);

// Small vector helpers. All of them require equal sizes.
void require_dim(const Vec& v, std::size_t dim, const char* what);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(double c, const Vec& a);
double max_abs_diff(const Vec& a, const Vec& b);
double sup_norm(const Vec& v);
bool all_finite(const Vec& v);
Vec concat(const Vec& a, const Vec& b);

}  // namespace rdsio
