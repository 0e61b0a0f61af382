#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rdsio/axioms.hpp"
#include "rdsio/discrete.hpp"
#include "rdsio/linear.hpp"
#include "rdsio/report.hpp"

namespace rdsio {

/// Series connection: the upstream output trajectory drives the downstream
/// system. The combined flow acts on (x1, x2) with the upstream input.
struct Cascade {
  SystemFlow upstream;
  OutputMap h1;
  SystemFlow downstream;
  SystemFlow combined;
  /// Present when the combined flow comes from a product generator.
  std::optional<Generator> generator;
};

/// Combined flow evaluated by definition: (phi1(t, w, x1, u), phi2(t, w, x2, eta1)).
Cascade cascade(const SystemFlow& up, const OutputMap& h1, const SystemFlow& down);
/// Combined flow generated by g(w, (x1, x2), u) = (f1(w, x1, u), f2(w, x2, h1(w, x1))).
Cascade cascade(const Generator& f1, const OutputMap& h1, const Generator& f2);
/// Two scalar linear equations with h1(w, x) = gain(w) x, solved jointly.
Cascade cascade(const LinearCoeffs& up, const RandomVariable& gain, const LinearCoeffs& down);

struct IdentityReport {
  std::string name;
  double max_discrepancy = 0.0;
  std::size_t checked = 0;
  double tol = 0.0;
  bool passed = false;
};

struct CascadeCheckOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 11;
  double t_max = 40.0;
  Box state_box;  ///< default [-1, 1]^(n1 + n2)
  InputSampler input_sampler;
  /// Negative: exact in discrete time, 1e-9 relative in continuous time.
  double tolerance = -1.0;
};

/// combined(t, w, (x1, x2), u) against (phi1(t, w, x1, u), phi2(t, w, x2, eta1^{x1})).
IdentityReport check_cascade_identity(const Cascade& c, const CascadeCheckOptions& opts = {});

/// pi2 of the combined pullback from z against the downstream pullback from
/// pi2 z driven by the unshifted upstream output trajectory from pi1 z. When the
/// cascade has a generator, also checks pi2 xi^_{n+1}^z = pi2 xi^_n^{z^} with
/// z^(w) = g(theta_{-1} w, z(theta_{-1} w)).
IdentityReport verify_cascade_pullback(const Cascade& c, const RandomVariable& z, const Process& u,
                                       const std::vector<double>& times, const std::vector<Fiber>& fibers,
                                       double tol = 0.0);

/// x^(w) = f(theta_{-1} w, x(theta_{-1} w)) for an input-free generator.
RandomVariable advance_state(const Generator& f, const RandomVariable& x);

/// eta^{x^} against rho_1(eta^x) for an input-free generator with output h.
IdentityReport check_shift_lemma(const Generator& f, const OutputMap& h, const RandomVariable& x,
                                 const std::vector<double>& times, const std::vector<Fiber>& fibers);

struct LipschitzOptions {
  std::size_t samples = 2000;
  std::uint64_t seed = 13;
  /// Pairs are drawn from this box; infinite sides use log-uniform magnitudes.
  Box box;
  TemperedOptions tempered;
};

struct LipschitzReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// Largest |h(w, x1) - h(w, x2)| / (L(w) |x1 - x2|) seen.
  double worst_ratio = 0.0;
  TemperedReport tempered;
  bool passed = false;
};

/// Samples (w, x1, x2) and checks |h(w, x1) - h(w, x2)| <= L(w) |x1 - x2|, and
/// reports the growth diagnostic of L.
LipschitzReport check_lipschitz(const OutputMap& h, const RandomVariable& L, const LipschitzOptions& opts);

/// Feedback interconnection of two discrete systems: the output of each one is
/// the input of the other.
struct FeedbackLoop {
  Generator g1;
  OutputMap h1;
  Generator g2;
  OutputMap h2;
  /// Input-free flow on (x1, x2).
  SystemFlow closed;
};

FeedbackLoop feedback(const Generator& g1, const OutputMap& h1, const Generator& g2, const OutputMap& h2);

/// States and loop signals over steps 0..n-1 (states also at n):
/// nu_k = h1(theta_k w, x1_k), mu_k = h2(theta_k w, x2_k), then both states step.
struct LoopSignals {
  std::vector<Vec> x1, x2, mu, nu;
};

LoopSignals loop_signals(const FeedbackLoop& loop, std::size_t n, const Fiber& w, const Vec& x1, const Vec& x2);

/// Largest violation of nu_t = h1(theta_t w, phi1(t, w, x1, mu)),
/// mu_t = h2(theta_t w, phi2(t, w, x2, nu)) and of the closed flow against the
/// signal recursion, over t < n.
double loop_equation_residual(const FeedbackLoop& loop, std::size_t n, const Fiber& w, const Vec& x1,
                              const Vec& x2);

/// Values of a random variable on the orbit points theta_k w, k in [first, 0].
struct OrbitTable {
  std::int64_t first = 0;
  std::vector<Vec> values;

  std::size_t size() const { return values.size(); }
  const Vec& at(std::int64_t k) const { return values.at(static_cast<std::size_t>(k - first)); }
};

OrbitTable tabulate(const RandomVariable& r, const Fiber& w, std::int64_t first);

/// Maps an input table to the output table of the equilibrium it induces.
using TableMap = std::function<OrbitTable(const OrbitTable& input, const Fiber& w)>;

struct EquilibriumTables {
  OrbitTable state;
  OrbitTable output;
};

/// Equilibrium state and output along the orbit for a tabulated stationary
/// input: the state is run forward from `start` at the table's left edge and
/// the first `burn_in` points are dropped.
EquilibriumTables input_equilibrium(const Generator& g, const OutputMap& h, const OrbitTable& input,
                                    const Fiber& w, std::size_t burn_in, const Vec& start);

/// Input table -> output table of input_equilibrium.
TableMap output_characteristic_map(const Generator& g, const OutputMap& h, std::size_t burn_in, Vec start);

/// first, then second.
TableMap compose_maps(TableMap first, TableMap second);

struct SmallGainOptions {
  std::size_t max_iters = 60;
  double tol = 1e-12;
  /// Initial table covers k in [-window, 0].
  std::size_t window = 6000;
  /// A period-two orbit is reported when |mu_{j+2} - mu_j| <= cycle_ratio |mu_{j+1} - mu_j|
  /// while the latter stays above cycle_floor.
  double cycle_ratio = 1e-6;
  double cycle_floor = 1e-3;
};

struct SmallGainFiber {
  std::size_t fiber_id = 0;
  std::vector<double> distance;
  std::vector<double> distance2;
  /// mu at k = 0 after the last iteration.
  Vec fixed_point;
  OrbitTable table;
  bool converged = false;
  bool period_two = false;
};

struct SmallGainReport {
  /// sup over fibers of |mu_{j+1} - mu_j| per iteration.
  std::vector<double> sup_distance;
  /// exp of the fitted slope of log sup_distance.
  double rate = NAN;
  std::size_t iterations = 0;
  bool converged = false;
  bool period_two = false;
  std::vector<SmallGainFiber> fibers;
  std::vector<std::string> notes;
  Trace trace;
};

/// Iterates mu_{j+1} = charmap(mu_j) per fiber from the tabulated seed input.
SmallGainReport small_gain_iterate(const TableMap& charmap, const RandomVariable& seed_input,
                                   const std::vector<Fiber>& fibers, const SmallGainOptions& opts = {});

/// Equilibrium pair of the loop built from a fixed point mu of the composed
/// map: nu = output of system 1 under mu, then the states of both systems.
struct LoopEquilibrium {
  Vec x1, x2, mu, nu;
};

LoopEquilibrium reconstruct_equilibrium(const FeedbackLoop& loop, const OrbitTable& mu, const Fiber& w,
                                        std::size_t burn_in, const Vec& start1, const Vec& start2);

void to_json(nlohmann::json& j, const IdentityReport& r);
void to_json(nlohmann::json& j, const LipschitzReport& r);
void to_json(nlohmann::json& j, const SmallGainReport& r);

}  // namespace rdsio
