#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gradplay/cycles.hpp"
#include "gradplay/errors.hpp"
#include "gradplay/families.hpp"

using namespace gradplay;

TEST(Flow, RotationConservesRadius) {
  const Game g = MakeQuadraticZeroSum(0, 1, 0);
  Vector x0(2);
  x0 << 1, 0;
  const double dt = 1e-3;
  const long steps = static_cast<long>(std::round(2 * std::numbers::pi / dt));
  const Vector x = IntegrateFlow(g, x0, dt, steps);
  EXPECT_LT(std::abs(x.squaredNorm() - 1.0), 1e-6);
  // -omega = (-x2, x1): counter-clockwise rotation back to the start.
  EXPECT_LT((x - x0).norm(), 1e-3);
}

TEST(Flow, MonodromyOfLinearFlowIsMatrixExponential) {
  const Game g = MakeQuadraticPotential(1, 0.5, 1);
  Vector x0(2);
  x0 << 0.3, -0.2;
  const auto [x, M] = FlowWithMonodromy(g, x0, 1.0, 1e-3);
  // D omega has eigenvalues 1.5 (along (1,1)) and 0.5 (along (1,-1)).
  Matrix V(2, 2);
  V << 1, 1, 1, -1;
  const Matrix expected = V * Vector((Vector(2) << std::exp(-1.5), std::exp(-0.5)).finished())
                                  .asDiagonal() * V.inverse();
  EXPECT_LT((M - expected).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((x - expected * x0).norm(), 1e-10);
}

TEST(DetectLimitCycle, VanDerPolIsStable) {
  const auto r = DetectLimitCycle(MakeVanDerPolGame(1.0), StrategyProfile{0.1, 0.0});
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->period, 6.6633, 0.05);
  EXPECT_EQ(r->classification, CycleStability::kLinearlyStable);
  EXPECT_LT(std::abs(r->trivial_multiplier - Complex(1.0, 0.0)), 1e-3);
  ASSERT_EQ(r->characteristic_multipliers.size(), 1u);
  EXPECT_LT(std::abs(r->characteristic_multipliers[0]), 1.0);
  EXPECT_EQ(r->multipliers.size(), 2u);
}

TEST(DetectLimitCycle, RotationIsNonHyperbolic) {
  const auto r = DetectLimitCycle(MakeQuadraticZeroSum(0, 1, 0), StrategyProfile{1.0, 0.0});
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->period, 2 * std::numbers::pi, 0.01);
  EXPECT_EQ(r->classification, CycleStability::kNonHyperbolic);
  EXPECT_LT(std::abs(r->trivial_multiplier - Complex(1.0, 0.0)), 1e-3);
}

TEST(DetectLimitCycle, UnstableCycleOfReversedVanDerPol) {
  // Negating the costs reverses the flow, turning the attracting cycle into a
  // repelling one. Start on the cycle so the orbit stays near it.
  const Game vdp = MakeVanDerPolGame(1.0);
  CycleOptions settle;
  settle.t_transient = 60.0;
  const auto stable = DetectLimitCycle(vdp, StrategyProfile{0.1, 0.0}, settle);
  ASSERT_TRUE(stable.has_value());
  std::vector<PolynomialCost> neg;
  for (const auto& c : vdp.costs()) {
    std::vector<Monomial> terms = c.terms();
    for (auto& t : terms) t.coef = -t.coef;
    neg.emplace_back(2, terms);
  }
  const Game reversed(PlayerDims::Scalar(2), neg);
  CycleOptions opt;
  opt.t_max = 20.0;
  const auto r = DetectLimitCycle(reversed, stable->anchor_point, opt);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->classification, CycleStability::kLinearlyUnstable);
  EXPECT_NEAR(r->period, stable->period, 1e-2);
}

TEST(DetectLimitCycle, NoneForPotentialGames) {
  for (const auto& g : {MakeQuadraticPotential(1, 0.5, 1), MakeQuadraticPotential(1, 2, 1),
                        MakeQuadraticPotential(2, -1, 3)}) {
    for (const auto& x0 : {StrategyProfile{1, 0}, StrategyProfile{-0.5, 0.7}}) {
      EXPECT_FALSE(DetectLimitCycle(g, x0).has_value()) << g.label();
    }
  }
}

TEST(DetectLimitCycle, RejectsBadOptions) {
  CycleOptions opt;
  opt.dt = 0.0;
  EXPECT_THROW(DetectLimitCycle(MakeVanDerPolGame(1.0), StrategyProfile{1, 0}, opt),
               InvalidParameter);
}
