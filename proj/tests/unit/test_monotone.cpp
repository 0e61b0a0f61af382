#include <gtest/gtest.h>

#include <cmath>

#include "models.hpp"

using namespace rdsio;

namespace {

// u_t(w) = u_inf(theta_t w) + e^{-t} d(theta_t w), so the pullback is u_inf + e^{-t} d.
Process converging_input(const RandomVariable& u_inf, const RandomVariable& d) {
  return Process(1, TimeKind::continuous, [u_inf, d](double t, const Fiber& w) {
    const Fiber at = shift(w, t);
    return Vec{u_inf.scalar(at) + std::exp(-t) * d.scalar(at)};
  });
}

}  // namespace

TEST(Orthant, OrderAxiomsOnSamples) {
  const OrthantOrder order(3);
  Sampler s(30);
  const Box box{Vec(3, -1.0), Vec(3, 1.0)};
  for (int k = 0; k < 2000; ++k) {
    const Vec a = s.uniform_vec(box), b = s.uniform_vec(box), c = s.uniform_vec(box);
    EXPECT_TRUE(order.leq(a, a));
    if (order.leq(a, b) && order.leq(b, c)) EXPECT_TRUE(order.leq(a, c));
    if (order.leq(a, b) && order.leq(b, a)) EXPECT_EQ(a, b);
    EXPECT_EQ(order.leq(a, b), order.margin(a, b) >= 0.0);
  }
  EXPECT_TRUE(order.leq({0, 1, 2}, {0, 1, 3}));
  EXPECT_FALSE(order.leq({0, 1, 2}, {1, 0, 3}));
  EXPECT_EQ(order.margin({0, 1, 2}, {1, 0, 3}), -1.0);
}

TEST(Monotone, LinearWithNonnegativeGain) {
  const LinearCoeffs c{models::uniform_cells(-2, 0.3, 303), models::uniform_cells(0, 2, 320), std::nullopt};
  MonotoneOptions opts;
  opts.samples = 1000;
  const MonotoneReport rep = check_monotone(linear_system(c), OrthantOrder(1), opts);
  EXPECT_TRUE(rep.passed) << rep.worst_case;
  EXPECT_EQ(rep.checked, 1000u);
  EXPECT_GE(rep.worst_margin, 0.0);
}

TEST(Monotone, AffineGenerator) {
  MonotoneOptions opts;
  opts.samples = 1000;
  EXPECT_TRUE(check_monotone(flow_from_generator(models::affine_noisy()), OrthantOrder(1), opts).passed);
}

TEST(Monotone, OrderReversingFault) {
  const Generator flip{1, 1, [](const Fiber&, const Vec& x, const Vec&) { return Vec{-x[0]}; }};
  MonotoneOptions opts;
  opts.samples = 500;
  const MonotoneReport rep = check_monotone(flow_from_generator(flip), OrthantOrder(1), opts);
  EXPECT_FALSE(rep.passed);
  EXPECT_GT(rep.violations, 0u);
  EXPECT_LT(rep.worst_margin, 0.0);
  EXPECT_FALSE(rep.worst_case.empty());
}

TEST(Monotone, DimensionMismatch) {
  EXPECT_THROW(check_monotone(flow_from_generator(models::affine_noisy()), OrthantOrder(2)), DimensionError);
}

TEST(Brackets, StationaryInputIsItsOwnBracket) {
  const RandomVariable q = models::uniform_cells(-1, 1, 321);
  const BracketPair br = brackets(stationary(q, TimeKind::continuous), 2.0, 30.0, 1.0);
  for (const Fiber& w : make_fibers(31, 50, TimeKind::continuous)) {
    EXPECT_EQ(br.a_tau(w), q(w));
    EXPECT_EQ(br.b_tau(w), q(w));
  }
}

TEST(Brackets, DecayingInputEnvelope) {
  const RandomVariable u_inf = models::uniform_cells(-1, 1, 322);
  const Process u = converging_input(u_inf, RandomVariable::constant({1.0}));
  for (double tau : {0.0, 1.0, 5.0, 12.0}) {
    const BracketPair br = brackets(u, tau, 40.0, 1.0, u_inf);
    for (const Fiber& w : make_fibers(32, 50, TimeKind::continuous)) {
      EXPECT_EQ(br.a_tau.scalar(w), u_inf.scalar(w));
      EXPECT_LE(br.b_tau.scalar(w) - u_inf.scalar(w), std::exp(-tau) + 1e-15);
    }
  }
}

TEST(Brackets, GridIsMultiplesOfStep) {
  EXPECT_EQ(bracket_grid(0.5, 3.0, 1.0), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(bracket_grid(2.0, 4.0, 1.0), (std::vector<double>{2.0, 3.0, 4.0}));
  EXPECT_THROW(bracket_grid(0.0, 3.0, 0.0), Error);
}

TEST(Brackets, SandwichAndMonotonicity) {
  const RandomVariable u_inf = models::uniform_cells(-1, 1, 323);
  const Process u = converging_input(u_inf, models::uniform_cells(-1, 1, 324));
  const SandwichReport rep =
      check_brackets(u, {0, 1, 2, 5, 10}, 30.0, 1.0, make_fibers(33, 50, TimeKind::continuous), u_inf);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.monotonicity_violations, 0u);
  EXPECT_GT(rep.checked, 0u);
}

TEST(Brackets, UnboundedSamplesAreRejected) {
  const Process blowup(1, TimeKind::continuous, [](double t, const Fiber&) { return Vec{t > 3 ? INFINITY : 0.0}; });
  const BracketPair br = brackets(blowup, 0.0, 10.0, 1.0);
  EXPECT_THROW(br.a_tau(Fiber{}), NonFiniteError);
}

TEST(Cics, LinearConvergingInput) {
  const LinearCoeffs c = models::random_linear();
  const RandomVariable u_inf = models::uniform_cells(-1, 1, 325);
  const Process u = converging_input(u_inf, models::uniform_cells(-1, 1, 326));
  CicsOptions opts;
  opts.schedule = time_grid(0, 40, 2);
  const std::vector<RandomVariable> states{RandomVariable::constant({0.0}), models::uniform_cells(-5, 5, 327)};
  const ConvergenceReport rep =
      cics_experiment(linear_system(c), characteristic_rv(c, u_inf), u, states, make_fibers(34, 20, TimeKind::continuous), opts);
  EXPECT_TRUE(rep.passed) << rep.worst_residual;
  ASSERT_TRUE(rep.domination.has_value());
  EXPECT_TRUE(rep.domination->tempered_consistent);
}

TEST(Cics, StationaryInputAgreesWithEstimate) {
  const LinearCoeffs c = models::random_linear();
  const RandomVariable u_inf = models::uniform_cells(-1, 1, 328);
  const std::vector<Fiber> fibers = make_fibers(35, 10, TimeKind::continuous);
  CicsOptions opts;
  opts.schedule = {60.0};
  opts.tol = 1e-9;
  const ConvergenceReport rep = cics_experiment(linear_system(c), characteristic_rv(c, u_inf),
                                                stationary(u_inf, TimeKind::continuous),
                                                {RandomVariable::constant({0.0})}, fibers, opts);
  EstimateOptions eopts;
  eopts.horizon = 60;
  const CharacteristicEstimate est =
      estimate_characteristic(linear_system(c), u_inf, RandomVariable::constant({0.0}), fibers, eopts);
  EXPECT_TRUE(rep.passed);
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    EXPECT_NEAR(rep.fibers[i].final_state[0], est.report.fibers[i].limit[0], 1e-12);
  }
}

TEST(Cics, OrderedStatesStayOrdered) {
  const LinearCoeffs c = models::random_linear();
  const RandomVariable u_inf = models::uniform_cells(-1, 1, 329);
  const Process u = converging_input(u_inf, models::uniform_cells(-1, 1, 330));
  const SystemFlow sys = linear_system(c);
  const Process lo = pullback_trajectory(sys, RandomVariable::constant({-3.0}), u);
  const Process hi = pullback_trajectory(sys, RandomVariable::constant({3.0}), u);
  for (const Fiber& w : make_fibers(36, 20, TimeKind::continuous)) {
    for (double t : time_grid(0, 40, 1)) EXPECT_LE(lo(t, w)[0], hi(t, w)[0]);
    EXPECT_NEAR(lo(40, w)[0], hi(40, w)[0], 1e-6);
  }
}

TEST(Cics, NonConvergenceReportsWorstFiber) {
  const LinearCoeffs c = models::random_linear();
  const RandomVariable u_inf = models::uniform_cells(-1, 1, 331);
  CicsOptions opts;
  opts.schedule = {1.0, 2.0};
  const ConvergenceReport rep = cics_experiment(linear_system(c), characteristic_rv(c, u_inf),
                                                stationary(u_inf, TimeKind::continuous),
                                                {RandomVariable::constant({50.0})},
                                                make_fibers(37, 5, TimeKind::continuous), opts);
  EXPECT_FALSE(rep.passed);
  EXPECT_FALSE(rep.notes.empty());
  EXPECT_GT(rep.worst_residual, 1e-4);
}
