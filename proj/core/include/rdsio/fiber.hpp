#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rdsio/types.hpp"

namespace rdsio {

/// A point of the sample space: a seeded noise realization observed from a
/// time offset. The base flow acts by offset addition, so shifting by t then
/// by s is shifting by t+s (exactly for integer offsets).
struct Fiber {
  std::uint64_t seed = 0;
  double offset = 0.0;

  friend bool operator==(const Fiber&, const Fiber&) = default;
};

/// The base flow theta_t.
inline Fiber shift(const Fiber& w, double t) { return Fiber{w.seed, w.offset + t}; }

/// Index of the unit noise cell [k, k+1) containing the fiber's offset.
inline std::int64_t cell_index(double offset) {
  return static_cast<std::int64_t>(std::floor(offset));
}

/// `count` fibers with independent seeds derived from `master_seed`. Offsets
/// are integers in discrete time and arbitrary reals in continuous time so
/// cell boundaries are not aligned with t = 0.
std::vector<Fiber> make_fibers(std::uint64_t master_seed, std::size_t count, TimeKind kind);

}  // namespace rdsio
