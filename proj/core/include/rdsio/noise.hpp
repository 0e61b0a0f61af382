#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rdsio/types.hpp"

namespace rdsio {

/// splitmix64 finalizer. Portable and bit-identical on every platform.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-mode draw keyed by (seed, stream, counter, lane).
constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter, std::uint64_t lane) {
  const std::uint64_t key = mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
  return mix64(mix64(key + counter) ^ (lane * 0xd1b54a32d192ed03ULL));
}

/// Maps 64 random bits onto [0, 1) with 53 bits of resolution.
constexpr double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace law {

struct Constant {
  Vec value;
};

/// Independent uniform coordinates on a box.
struct Uniform {
  Vec low;
  Vec high;
};

/// Finite support with optional weights (uniform when empty).
struct Discrete {
  std::vector<Vec> support;
  std::vector<double> weights;
};

/// Independent exponential coordinates; unbounded but tempered.
struct Exponential {
  Vec rate;
};

}  // namespace law

using CellLaw = std::variant<law::Constant, law::Uniform, law::Discrete, law::Exponential>;

std::size_t law_dim(const CellLaw& law);
/// Essential range of the law (infinite upper bound for exponential).
Box law_range(const CellLaw& law);
Vec law_mean(const CellLaw& law);
/// Throws Error on inconsistent dimensions, empty support or bad parameters.
void validate_law(const CellLaw& law);

/// An i.i.d. sequence of noise cells indexed by all integers. The value of a
/// cell is a pure function of (seed, stream, cell index, law).
class CellNoise {
 public:
  CellNoise(CellLaw law, std::uint64_t stream);

  Vec value(std::uint64_t seed, std::int64_t cell) const;
  double scalar(std::uint64_t seed, std::int64_t cell) const { return value(seed, cell)[0]; }

  std::size_t dim() const { return dim_; }
  std::uint64_t stream() const { return stream_; }
  const CellLaw& law() const { return law_; }
  Box range() const { return law_range(law_); }
  Vec mean() const { return law_mean(law_); }

 private:
  CellLaw law_;
  std::uint64_t stream_;
  std::size_t dim_;
};

/// Deterministic counter-based sampler for test-case generation.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t bits() { return counter_bits(seed_, stream_, counter_++, 0); }
  double uniform() { return unit_double(bits()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  Vec uniform_vec(const Box& box);
  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace rdsio
