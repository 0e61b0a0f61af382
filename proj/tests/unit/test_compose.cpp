#include <gtest/gtest.h>

#include <cmath>

#include "models.hpp"

using namespace rdsio;

namespace {

const OutputMap kSquare(1, 1, [](const Fiber&, const Vec& x) { return Vec{x[0] * x[0]}; });

Generator input_free(std::uint64_t stream) {
  const RandomVariable n = models::uniform_cells(-1, 1, stream);
  return Generator{1, 0, [n](const Fiber& w, const Vec& x, const Vec&) { return Vec{0.6 * x[0] + n.scalar(w)}; }};
}

Generator driven(std::uint64_t stream) {
  const RandomVariable a = models::uniform_cells(-0.9, 0.9, stream);
  return Generator{1, 1, [a](const Fiber& w, const Vec& x, const Vec& u) { return Vec{a.scalar(w) * x[0] + u[0]}; }};
}

}  // namespace

TEST(Cascade, GeneratorPairIdentityExact) {
  const Cascade c = cascade(models::affine_noisy(), kSquare, driven(340));
  CascadeCheckOptions opts;
  opts.samples = 300;
  const IdentityReport rep = check_cascade_identity(c, opts);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.max_discrepancy, 0.0);
  AxiomOptions aopts;
  aopts.samples = 300;
  EXPECT_TRUE(check_axioms(c.combined, aopts).passed());
}

TEST(Cascade, LinearPairIdentityWithinTolerance) {
  const Cascade c = cascade(models::random_linear(), models::uniform_cells(0.5, 2, 341),
                            models::random_linear(-1.5, -0.2, 342));
  CascadeCheckOptions opts;
  opts.samples = 100;
  // The joint closed form needs inputs that are constant on noise cells.
  opts.input_sampler = [](Sampler& s) -> Process {
    const Process a = stationary(RandomVariable::cell(law::Uniform{{-1}, {1}}, s.bits()), TimeKind::continuous);
    const Process b = Process::constant({s.uniform(-1, 1)}, TimeKind::continuous);
    return s.coin() ? concat(a, b, s.uniform(0, 10)) : a;
  };
  const IdentityReport rep = check_cascade_identity(c, opts);
  EXPECT_TRUE(rep.passed) << rep.max_discrepancy;
  EXPECT_LE(rep.max_discrepancy, 1e-9);
}

TEST(Cascade, ZeroOutputDecouples) {
  const SystemFlow up = flow_from_generator(models::affine_noisy());
  const SystemFlow down = flow_from_generator(driven(343));
  const Cascade c = cascade(up, OutputMap(1, 1, [](const Fiber&, const Vec&) { return Vec{0.0}; }), down);
  const Process zero = Process::constant({0.0}, TimeKind::discrete);
  const Process u = stationary(models::uniform_cells(-1, 1, 344), TimeKind::discrete);
  for (const Fiber& w : make_fibers(40, 20, TimeKind::discrete)) {
    for (double t : {0.0, 3.0, 17.0}) EXPECT_EQ(c.combined(t, w, {0.3, -0.7}, u)[1], down(t, w, {-0.7}, zero)[0]);
  }
}

TEST(Cascade, DimensionMismatch) {
  const OutputMap two(1, 2, [](const Fiber&, const Vec& x) { return Vec{x[0], x[0]}; });
  EXPECT_THROW(cascade(models::affine_noisy(), two, driven(345)), DimensionError);
  EXPECT_THROW(cascade(flow_from_generator(models::affine_noisy()), kSquare, linear_system(models::random_linear())),
               Error);
}

TEST(CascadePullback, BaseCase) {
  const Cascade c = cascade(models::affine_noisy(), kSquare, driven(346));
  const RandomVariable z = RandomVariable::cell(law::Uniform{{-1, -1}, {1, 1}}, 347);
  const Process u = stationary(models::uniform_cells(-1, 1, 348), TimeKind::discrete);
  const std::vector<Fiber> fibers = make_fibers(41, 50, TimeKind::discrete);
  const IdentityReport rep = verify_cascade_pullback(c, z, u, {0.0}, fibers);
  EXPECT_TRUE(rep.passed);
  const Process lhs = pullback_trajectory(c.combined, z, u);
  for (const Fiber& w : fibers) EXPECT_EQ(lhs(0, w)[1], z(w)[1]);
}

TEST(CascadePullback, DrivenPairExact) {
  const Cascade c = cascade(models::affine_noisy(), kSquare, driven(349));
  const RandomVariable z = RandomVariable::cell(law::Uniform{{-2, -2}, {2, 2}}, 350);
  const Process u = default_input_sampler(1, TimeKind::discrete)(*std::make_unique<Sampler>(42));
  const IdentityReport rep =
      verify_cascade_pullback(c, z, u, time_grid(0, 40, 1), make_fibers(42, 30, TimeKind::discrete));
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.max_discrepancy, 0.0);
}

TEST(CascadePullback, InputFreePairIncludesAdvancedState) {
  const Cascade c = cascade(input_free(351), kSquare, driven(352));
  ASSERT_TRUE(c.generator.has_value());
  const RandomVariable z = RandomVariable::cell(law::Uniform{{-2, -2}, {2, 2}}, 353);
  const std::vector<double> times = time_grid(0, 40, 1);
  const IdentityReport rep =
      verify_cascade_pullback(c, z, Process::none(TimeKind::discrete), times, make_fibers(43, 30, TimeKind::discrete));
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.checked, 2 * 30 * times.size());
}

TEST(CascadePullback, WrongDownstreamDrivingIsDetected) {
  // Driving the downstream with the shifted output breaks the identity.
  const Cascade good = cascade(models::affine_noisy(), kSquare, driven(354));
  Cascade bad = good;
  bad.h1 = OutputMap(1, 1, [](const Fiber& w, const Vec& x) { return Vec{x[0] * x[0] + 1e-3 * w.offset}; });
  const RandomVariable z = RandomVariable::cell(law::Uniform{{-1, -1}, {1, 1}}, 355);
  const IdentityReport rep = verify_cascade_pullback(bad, z, Process::constant({0.0}, TimeKind::discrete),
                                                     {1, 5, 10}, make_fibers(44, 10, TimeKind::discrete));
  EXPECT_FALSE(rep.passed);
}

TEST(ShiftLemma, AdvancedStateShiftsOutput) {
  const Generator f = input_free(356);
  const OutputMap h(1, 1, [g = models::uniform_cells(0.5, 2, 357)](const Fiber& w, const Vec& x) {
    return Vec{g.scalar(w) * std::tanh(x[0])};
  });
  const RandomVariable x = models::uniform_cells(-3, 3, 358);
  const IdentityReport rep = check_shift_lemma(f, h, x, time_grid(0, 30, 1), make_fibers(45, 20, TimeKind::discrete));
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.max_discrepancy, 0.0);
  EXPECT_THROW(advance_state(models::affine_noisy(), x), Error);
}

TEST(Lipschitz, ClampIsOneLipschitz) {
  const OutputMap clamp(1, 1, [](const Fiber&, const Vec& x) { return Vec{std::clamp(x[0], 0.0, 2.0)}; });
  LipschitzOptions opts;
  opts.box = Box{{-5}, {5}};
  const LipschitzReport rep = check_lipschitz(clamp, RandomVariable::constant({1.0}), opts);
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.worst_ratio, 1.0 + 1e-12);
}

TEST(Lipschitz, RandomGainWithTemperedBound) {
  const RandomVariable g = models::uniform_cells(-3, 3, 359);
  const OutputMap h(1, 1, [g](const Fiber& w, const Vec& x) { return Vec{g.scalar(w) * x[0]}; });
  const RandomVariable L(1, [g](const Fiber& w) { return Vec{std::abs(g.scalar(w))}; }, Regularity::cell_constant);
  LipschitzOptions opts;
  opts.box = Box{{-INFINITY}, {INFINITY}};
  const LipschitzReport rep = check_lipschitz(h, L, opts);
  EXPECT_TRUE(rep.passed);
  EXPECT_TRUE(rep.tempered.tempered_consistent);
}

TEST(Lipschitz, SquareHasNoConstantBound) {
  LipschitzOptions opts;
  opts.box = Box{{-INFINITY}, {INFINITY}};
  for (double l : {1.0, 100.0, 1e4}) {
    const LipschitzReport rep = check_lipschitz(kSquare, RandomVariable::constant({l}), opts);
    EXPECT_FALSE(rep.passed);
    EXPECT_GT(rep.violations, 0u);
  }
}

TEST(Feedback, LoopEquationsHoldExactly) {
  const OutputMap sat1(1, 1, [](const Fiber&, const Vec& x) { return Vec{std::clamp(x[0], -1.0, 1.0)}; });
  const OutputMap sat2(1, 1, [](const Fiber&, const Vec& x) { return Vec{std::clamp(-0.5 * x[0], -0.3, 0.3)}; });
  const FeedbackLoop loop = feedback(models::affine_noisy(360), sat1, models::affine_noisy(361), sat2);
  Sampler s(46);
  for (const Fiber& w : make_fibers(46, 50, TimeKind::discrete)) {
    EXPECT_EQ(loop_equation_residual(loop, 40, w, {s.uniform(-2, 2)}, {s.uniform(-2, 2)}), 0.0);
  }
  AxiomOptions opts;
  opts.samples = 300;
  EXPECT_TRUE(check_axioms(loop.closed, opts).passed());
}

TEST(Feedback, ZeroReturnPathIsCascade) {
  const OutputMap zero(1, 1, [](const Fiber&, const Vec&) { return Vec{0.0}; });
  const Generator g1 = driven(362);
  const Generator g2 = driven(363);
  const FeedbackLoop loop = feedback(g1, kSquare, g2, zero);
  const Cascade c = cascade(g1, kSquare, g2);
  const Process quiet = Process::constant({0.0}, TimeKind::discrete);
  for (const Fiber& w : make_fibers(47, 30, TimeKind::discrete)) {
    for (double t : {0.0, 1.0, 12.0, 40.0}) {
      EXPECT_EQ(loop.closed(t, w, {0.4, -1.1}, Process::none(TimeKind::discrete)), c.combined(t, w, {0.4, -1.1}, quiet));
    }
  }
}

TEST(Feedback, DimensionMismatch) {
  const OutputMap two(1, 2, [](const Fiber&, const Vec& x) { return Vec{x[0], x[0]}; });
  EXPECT_THROW(feedback(driven(1), two, driven(2), kSquare), DimensionError);
}

TEST(Feedback, EquilibriumGivesStationaryLoopSignals) {
  // The closed loop forgets its start at rate <= 0.824, so a long pullback is an
  // equilibrium pair to working precision.
  const FeedbackLoop loop = models::contractive_loop();
  const Process path = pullback_trajectory(loop.closed, RandomVariable::constant({0.0, 0.0}),
                                           Process::none(TimeKind::discrete));
  const RandomVariable pair(2, [path](const Fiber& w) { return path(300, w); });
  const RandomVariable x1(1, [pair](const Fiber& w) { return Vec{pair(w)[0]}; });
  const RandomVariable x2(1, [pair](const Fiber& w) { return Vec{pair(w)[1]}; });
  const RandomVariable mu(1, [&loop, x2](const Fiber& w) { return loop.h2(w, x2(w)); });
  const RandomVariable nu(1, [&loop, x1](const Fiber& w) { return loop.h1(w, x1(w)); });
  const std::vector<Fiber> fibers = make_fibers(48, 10, TimeKind::discrete);
  const auto times = time_grid(0, 10, 1);
  EXPECT_TRUE(check_equilibrium(flow_from_generator(loop.g1), {x1, mu}, times, fibers, 1e-12).passed);
  EXPECT_TRUE(check_equilibrium(flow_from_generator(loop.g2), {x2, nu}, times, fibers, 1e-12).passed);
}

TEST(SmallGain, ContractiveLoopConverges) {
  const FeedbackLoop loop = models::contractive_loop();
  const TableMap T = compose_maps(output_characteristic_map(loop.g1, loop.h1, 40, {0.0}),
                                  output_characteristic_map(loop.g2, loop.h2, 40, {0.0}));
  SmallGainOptions opts;
  opts.window = 4000;
  opts.max_iters = 45;
  opts.tol = 1e-10;
  const std::vector<Fiber> fibers = make_fibers(49, 5, TimeKind::discrete);
  const SmallGainReport a = small_gain_iterate(T, models::uniform_cells(-1, 1, 364), fibers, opts);
  const SmallGainReport b = small_gain_iterate(T, RandomVariable::constant({5.0}), fibers, opts);
  EXPECT_TRUE(a.converged);
  EXPECT_FALSE(a.period_two);
  EXPECT_GE(a.rate, 0.4);
  EXPECT_LE(a.rate, 0.6);
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    EXPECT_NEAR(a.fibers[i].fixed_point[0], b.fibers[i].fixed_point[0], 1e-9);
  }
}

TEST(SmallGain, ZeroOutputConvergesImmediately) {
  const FeedbackLoop loop = models::contractive_loop();
  const OutputMap zero(1, 1, [](const Fiber&, const Vec&) { return Vec{0.0}; });
  const TableMap T = compose_maps(output_characteristic_map(loop.g1, zero, 40, {0.0}),
                                  output_characteristic_map(loop.g2, loop.h2, 40, {0.0}));
  SmallGainOptions opts;
  opts.window = 1000;
  const SmallGainReport rep = small_gain_iterate(T, models::uniform_cells(-1, 1, 365), make_fibers(50, 3, TimeKind::discrete), opts);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.iterations, 2u);
}

TEST(SmallGain, SaturatedLoopHasPeriodTwo) {
  const FeedbackLoop loop = models::saturated_loop();
  const TableMap T = compose_maps(output_characteristic_map(loop.g1, loop.h1, 40, {0.0}),
                                  output_characteristic_map(loop.g2, loop.h2, 40, {0.0}));
  SmallGainOptions opts;
  opts.window = 3000;
  opts.max_iters = 30;
  const SmallGainReport rep =
      small_gain_iterate(T, models::uniform_cells(0.2, 0.5, 366), make_fibers(51, 5, TimeKind::discrete), opts);
  EXPECT_FALSE(rep.converged);
  EXPECT_TRUE(rep.period_two);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(SmallGain, ClosedLoopReachesReconstructedPair) {
  const FeedbackLoop loop = models::contractive_loop();
  const TableMap T = compose_maps(output_characteristic_map(loop.g1, loop.h1, 40, {0.0}),
                                  output_characteristic_map(loop.g2, loop.h2, 40, {0.0}));
  SmallGainOptions opts;
  opts.window = 4000;
  opts.max_iters = 45;
  opts.tol = 1e-10;
  const std::vector<Fiber> fibers = make_fibers(52, 5, TimeKind::discrete);
  const SmallGainReport rep = small_gain_iterate(T, RandomVariable::constant({0.0}), fibers, opts);
  ASSERT_TRUE(rep.converged);
  const Process path = pullback_trajectory(loop.closed, RandomVariable::cell(law::Uniform{{-2, -2}, {2, 2}}, 367),
                                           Process::none(TimeKind::discrete));
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const LoopEquilibrium eq = reconstruct_equilibrium(loop, rep.fibers[i].table, fibers[i], 40, {0.0}, {0.0});
    const Vec z = path(60, fibers[i]);
    EXPECT_NEAR(z[0], eq.x1[0], 1e-4);
    EXPECT_NEAR(z[1], eq.x2[0], 1e-4);
    EXPECT_NEAR(eq.mu[0], loop.h2(fibers[i], eq.x2)[0], 1e-9);
  }
}
