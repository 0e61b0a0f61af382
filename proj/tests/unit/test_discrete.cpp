#include <gtest/gtest.h>

#include "models.hpp"

using namespace rdsio;

namespace {

// Left fold of f along the orbit, written independently of flow_from_generator.
double fold(const Generator& g, int n, const Fiber& w, double x, const Process& u) {
  double acc = x;
  for (int k = 0; k < n; ++k) acc = g.f(Fiber{w.seed, w.offset + k}, {acc}, u(k, w))[0];
  return acc;
}

Process random_input(Sampler& s) { return default_input_sampler(1, TimeKind::discrete)(s); }

}  // namespace

TEST(Discrete, IdentityGenerator) {
  const SystemFlow sys = flow_from_generator(Generator{2, 1, [](const Fiber&, const Vec& x, const Vec&) { return x; }});
  const Process u = Process::constant({3.0}, TimeKind::discrete);
  for (int n : {0, 1, 7, 50}) EXPECT_EQ(sys(n, Fiber{1, 4}, {0.5, -2.0}, u), (Vec{0.5, -2.0}));
}

TEST(Discrete, HalfPlusInputUnrolled) {
  const SystemFlow sys = flow_from_generator(models::half_plus_input());
  for (double x : {0.0, 1.0, -3.5}) {
    for (double c : {0.0, 2.0, -0.25}) {
      EXPECT_EQ(sys(3, Fiber{2, 0}, {x}, Process::constant({c}, TimeKind::discrete))[0], x / 8 + 7 * c / 4);
    }
  }
}

TEST(Discrete, FlowMatchesFoldOracle) {
  const Generator g = models::affine_noisy();
  const SystemFlow sys = flow_from_generator(g);
  Sampler s(4);
  for (int k = 0; k < 300; ++k) {
    const Fiber w{s.bits(), double(s.integer(-1000, 1000))};
    const double x = s.uniform(-2, 2);
    const Process u = random_input(s);
    const int n = int(s.integer(0, 50));
    EXPECT_EQ(sys(n, w, {x}, u)[0], fold(g, n, w, x, u));
  }
}

TEST(Discrete, GeneratorFromFlowRecoversGenerator) {
  const Generator g = models::affine_noisy();
  const Generator back = generator_from_flow(flow_from_generator(g));
  Sampler s(5);
  for (int k = 0; k < 1000; ++k) {
    const Fiber w{s.bits(), double(s.integer(-1000, 1000))};
    const Vec x{s.uniform(-5, 5)};
    const Vec u{s.uniform(-5, 5)};
    EXPECT_EQ(back(w, x, u), g(w, x, u));
  }
}

TEST(Discrete, IdentitySystemGivesIdentityGenerator) {
  const SystemFlow id(TimeKind::discrete, 1, 1, [](double, const Fiber&, const Vec& x, const Process&) { return x; });
  const Generator f = generator_from_flow(id);
  EXPECT_EQ(f(Fiber{3, 1}, {2.5}, {9.0}), (Vec{2.5}));
}

TEST(Discrete, FlowGeneratorFlowRoundTrip) {
  for (const Generator& g : {models::half_plus_input(), models::affine_noisy(), models::planar_noisy()}) {
    const SystemFlow sys = flow_from_generator(g);
    const SystemFlow again = flow_from_generator(generator_from_flow(sys));
    Sampler s(6);
    const Box box{Vec(g.state_dim, -2.0), Vec(g.state_dim, 2.0)};
    for (int k = 0; k < 200; ++k) {
      const Fiber w{s.bits(), double(s.integer(-1000, 1000))};
      const Vec x = s.uniform_vec(box);
      const Process u = random_input(s);
      const int n = int(s.integer(0, 50));
      EXPECT_EQ(again(n, w, x, u), sys(n, w, x, u));
    }
  }
}

TEST(Discrete, AxiomsHoldExactly) {
  for (const Generator& g : {models::affine_noisy(), models::planar_noisy()}) {
    AxiomOptions opts;
    opts.samples = 1000;
    const AxiomReport rep = check_axioms(flow_from_generator(g), opts);
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.splice.max_violation, 0.0);
    EXPECT_EQ(rep.causality.max_violation, 0.0);
    EXPECT_EQ(rep.splice.checked, 1000u);
  }
}

TEST(Discrete, RejectsContinuousSystem) {
  const SystemFlow c(TimeKind::continuous, 1, 0, [](double, const Fiber&, const Vec& x, const Process&) { return x; });
  EXPECT_THROW(generator_from_flow(c), Error);
}

TEST(Discrete, DimensionChecks) {
  const SystemFlow sys = flow_from_generator(models::affine_noisy());
  EXPECT_THROW(sys(1, Fiber{}, {1.0, 2.0}, Process::constant({0.0}, TimeKind::discrete)), DimensionError);
  EXPECT_THROW(sys(1, Fiber{}, {1.0}, Process::constant({0.0, 1.0}, TimeKind::discrete)), DimensionError);
  EXPECT_THROW(sys(1.5, Fiber{}, {1.0}, Process::constant({0.0}, TimeKind::discrete)), Error);
}

TEST(Expr, Arithmetic) {
  ExprSymbols sym{2, 1, {"n"}, {}};
  const Expr e = Expr::parse("0.5*x0 - x1/4 + n*u0 + -(2)", sym);
  EXPECT_DOUBLE_EQ(e.eval({2, 8}, {3}, {0.5}), 1.0 - 2.0 + 1.5 - 2.0);
  EXPECT_EQ(Expr::parse("2 + 3 * 4", sym).eval({0, 0}, {0}, {0}), 14.0);
  EXPECT_EQ(Expr::parse("(2 + 3) * 4", sym).eval({0, 0}, {0}, {0}), 20.0);
  EXPECT_EQ(Expr::parse("1e-1 * 10", sym).eval({0, 0}, {0}, {0}), 1.0);
}

TEST(Expr, Functions) {
  ExprSymbols sym{1, 1, {}, {{"sat", Table{{-1, 0, 1}, {-2, 0, 1}}}}};
  EXPECT_EQ(Expr::parse("clamp(x, -1, 1)", sym).eval({3}, {0}, {}), 1.0);
  EXPECT_EQ(Expr::parse("abs(u) + min(x, 2) + max(x, 2)", sym).eval({5}, {-1}, {}), 1.0 + 2.0 + 5.0);
  EXPECT_EQ(Expr::parse("tab(sat, x)", sym).eval({-0.5}, {0}, {}), -1.0);
  EXPECT_EQ(Expr::parse("tab(sat, x)", sym).eval({10}, {0}, {}), 1.0);
  EXPECT_EQ(Expr::parse("tab(sat, x)", sym).eval({-10}, {0}, {}), -2.0);
}

TEST(Expr, ErrorsCarryColumn) {
  ExprSymbols sym{1, 0, {"n"}, {}};
  try {
    Expr::parse("x + y", sym);
    FAIL();
  } catch (const ExprError& e) {
    EXPECT_EQ(e.column(), 5u);
  }
  EXPECT_THROW(Expr::parse("x +", sym), ExprError);
  EXPECT_THROW(Expr::parse("clamp(x, 1)", sym), ExprError);
  EXPECT_THROW(Expr::parse("u0", sym), ExprError);
  EXPECT_THROW(Expr::parse("x1", sym), ExprError);
  EXPECT_THROW(Expr::parse("tab(nope, x)", sym), ExprError);
  EXPECT_THROW(Expr::parse("foo(x)", sym), ExprError);
  EXPECT_THROW(Expr::parse("x )", sym), ExprError);
}
