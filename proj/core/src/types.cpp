#include "rdsio/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdsio {

const char* to_string(TimeKind kind) {
  return kind == TimeKind::discrete ? "discrete" : "continuous";
}

bool Box::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

double Box::sup_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    m = std::max({m, std::abs(lo[i]), std::abs(hi[i])});
  }
  return m;
}

Box unbounded_box(std::size_t dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box{Vec(dim, -inf), Vec(dim, inf)};
}

void require_dim(const Vec& v, std::size_t dim, const char* what) {
  if (v.size() != dim) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(dim) +
                         ", got " + std::to_string(v.size()));
  }
}

Vec add(const Vec& a, const Vec& b) {
  require_dim(b, a.size(), "add");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  require_dim(b, a.size(), "sub");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(double c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  require_dim(b, a.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return std::numeric_limits<double>::infinity();
    m = std::max(m, d);
  }
  return m;
}

double sup_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vec concat(const Vec& a, const Vec& b) {
  Vec r;
  r.reserve(a.size() + b.size());
  r.insert(r.end(), a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

}  // namespace rdsio
