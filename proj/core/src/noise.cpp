#include "rdsio/noise.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "rdsio/fiber.hpp"

namespace rdsio {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::size_t law_dim(const CellLaw& law) {
  return std::visit(overloaded{
                        [](const law::Constant& c) { return c.value.size(); },
                        [](const law::Uniform& u) { return u.low.size(); },
                        [](const law::Discrete& d) {
                          return d.support.empty() ? std::size_t{0} : d.support.front().size();
                        },
                        [](const law::Exponential& e) { return e.rate.size(); },
                    },
                    law);
}

void validate_law(const CellLaw& law) {
  std::visit(overloaded{
                 [](const law::Constant& c) {
                   if (c.value.empty()) throw Error("constant law: empty value");
                   if (!all_finite(c.value)) throw Error("constant law: non-finite value");
                 },
                 [](const law::Uniform& u) {
                   if (u.low.empty() || u.low.size() != u.high.size())
                     throw Error("uniform law: low/high must be nonempty and of equal size");
                   for (std::size_t i = 0; i < u.low.size(); ++i) {
                     if (!(std::isfinite(u.low[i]) && std::isfinite(u.high[i])) || u.low[i] > u.high[i])
                       throw Error("uniform law: need finite low <= high");
                   }
                 },
                 [](const law::Discrete& d) {
                   if (d.support.empty()) throw Error("discrete law: empty support");
                   const std::size_t n = d.support.front().size();
                   for (const auto& s : d.support) {
                     if (s.size() != n || n == 0) throw Error("discrete law: ragged support");
                     if (!all_finite(s)) throw Error("discrete law: non-finite support point");
                   }
                   if (!d.weights.empty()) {
                     if (d.weights.size() != d.support.size())
                       throw Error("discrete law: weights and support differ in length");
                     double total = 0.0;
                     for (double w : d.weights) {
                       if (!(w >= 0.0) || !std::isfinite(w)) throw Error("discrete law: bad weight");
                       total += w;
                     }
                     if (!(total > 0.0)) throw Error("discrete law: weights sum to zero");
                   }
                 },
                 [](const law::Exponential& e) {
                   if (e.rate.empty()) throw Error("exponential law: empty rate");
                   for (double r : e.rate) {
                     if (!(r > 0.0) || !std::isfinite(r)) throw Error("exponential law: rate must be > 0");
                   }
                 },
             },
             law);
}

Box law_range(const CellLaw& law) {
  return std::visit(
      overloaded{
          [](const law::Constant& c) { return Box{c.value, c.value}; },
          [](const law::Uniform& u) { return Box{u.low, u.high}; },
          [](const law::Discrete& d) {
            Box b{d.support.front(), d.support.front()};
            for (const auto& s : d.support) {
              for (std::size_t i = 0; i < s.size(); ++i) {
                b.lo[i] = std::min(b.lo[i], s[i]);
                b.hi[i] = std::max(b.hi[i], s[i]);
              }
            }
            return b;
          },
          [](const law::Exponential& e) {
            return Box{Vec(e.rate.size(), 0.0),
                       Vec(e.rate.size(), std::numeric_limits<double>::infinity())};
          },
      },
      law);
}

Vec law_mean(const CellLaw& law) {
  return std::visit(overloaded{
                        [](const law::Constant& c) { return c.value; },
                        [](const law::Uniform& u) {
                          Vec m(u.low.size());
                          for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (u.low[i] + u.high[i]);
                          return m;
                        },
                        [](const law::Discrete& d) {
                          const std::size_t n = d.support.front().size();
                          Vec m(n, 0.0);
                          double total = 0.0;
                          for (std::size_t k = 0; k < d.support.size(); ++k) {
                            const double w = d.weights.empty() ? 1.0 : d.weights[k];
                            total += w;
                            for (std::size_t i = 0; i < n; ++i) m[i] += w * d.support[k][i];
                          }
                          for (double& x : m) x /= total;
                          return m;
                        },
                        [](const law::Exponential& e) {
                          Vec m(e.rate.size());
                          for (std::size_t i = 0; i < m.size(); ++i) m[i] = 1.0 / e.rate[i];
                          return m;
                        },
                    },
                    law);
}

CellNoise::CellNoise(CellLaw law, std::uint64_t stream) : law_(std::move(law)), stream_(stream) {
  validate_law(law_);
  dim_ = law_dim(law_);
}

Vec CellNoise::value(std::uint64_t seed, std::int64_t cell) const {
  const auto counter = static_cast<std::uint64_t>(cell);
  return std::visit(
      overloaded{
          [](const law::Constant& c) { return c.value; },
          [&](const law::Uniform& u) {
            Vec v(u.low.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
              const double r = unit_double(counter_bits(seed, stream_, counter, i));
              v[i] = u.low[i] + (u.high[i] - u.low[i]) * r;
            }
            return v;
          },
          [&](const law::Discrete& d) {
            const double r = unit_double(counter_bits(seed, stream_, counter, 0));
            std::size_t pick = d.support.size() - 1;
            if (d.weights.empty()) {
              pick = std::min(pick, static_cast<std::size_t>(r * static_cast<double>(d.support.size())));
            } else {
              const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
              double acc = 0.0;
              for (std::size_t k = 0; k < d.weights.size(); ++k) {
                acc += d.weights[k];
                if (r * total < acc) {
                  pick = k;
                  break;
                }
              }
            }
            return d.support[pick];
          },
          [&](const law::Exponential& e) {
            Vec v(e.rate.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
              const double r = unit_double(counter_bits(seed, stream_, counter, i));
              v[i] = -std::log1p(-r) / e.rate[i];
            }
            return v;
          },
      },
      law_);
}

std::int64_t Sampler::integer(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(bits() % span);
}

Vec Sampler::uniform_vec(const Box& box) {
  Vec v(box.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = uniform(box.lo[i], box.hi[i]);
  return v;
}

std::vector<Fiber> make_fibers(std::uint64_t master_seed, std::size_t count, TimeKind kind) {
  std::vector<Fiber> fibers;
  fibers.reserve(count);
  Sampler s(master_seed, 0xf1be7ULL);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = mix64(master_seed + 0x9e37ULL * (i + 1));
    const double offset = kind == TimeKind::discrete ? static_cast<double>(s.integer(-1000, 1000))
                                                     : s.uniform(-1000.0, 1000.0);
    fibers.push_back(Fiber{seed, offset});
  }
  return fibers;
}

}  // namespace rdsio
