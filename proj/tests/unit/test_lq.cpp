#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gradplay/census.hpp"
#include "gradplay/errors.hpp"
#include "gradplay/lq_game.hpp"
#include "gradplay/random.hpp"

using namespace gradplay;
using namespace gradplay::lq;

namespace {

Mat2 M(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

// Truncated series sum_t (A')^t W A^t; the tail is negligible for the
// contractions used here.
Mat2 SeriesCostToGo(const Mat2& A, const Mat2& W, int terms = 4000) {
  Mat2 P = Mat2::Zero();
  Mat2 At = Mat2::Identity();
  for (int t = 0; t < terms; ++t) {
    P += At.transpose() * W * At;
    At = A * At;
  }
  return P;
}

double SeriesCost(const LqGame& g, const FeedbackPolicy& p, int player) {
  const Mat2 Acl = g.A - g.B1 * p.K1 - g.B2 * p.K2;
  const Row2 K = p.K(player);
  const Mat2 W = g.Q(player) + K.transpose() * g.R(player) * K;
  return (SeriesCostToGo(Acl, W) * g.Z0).trace();
}

double Radius(const Mat2& m) { return m.eigenvalues().cwiseAbs().maxCoeff(); }

// Random census game plus a random stabilizing policy.
std::pair<LqGame, FeedbackPolicy> RandomStablePolicy(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0), k(-1.5, 1.5);
  while (true) {
    const LqGame g = MakeCensusGame(M(u(rng), u(rng), u(rng), u(rng)), 0.01 + u(rng),
                                    0.01 + u(rng));
    FeedbackPolicy p;
    p.K1 << k(rng), k(rng);
    p.K2 << k(rng), k(rng);
    if (Radius(ClosedLoop(g, p)) < 0.85) return {g, p};
  }
}

}  // namespace

TEST(LqGame, ValidationAndPbh) {
  LqGame g = MakeCensusGame(Mat2::Zero(), 0.1, 0.1);
  EXPECT_NO_THROW(g.validate());
  g.R2 = 0.0;
  EXPECT_THROW(g.validate(), InvalidParameter);
  g = MakeCensusGame(Mat2::Zero(), 0.1, 0.1);
  g.Q1 = M(1, 0, 0, -1);
  EXPECT_THROW(g.validate(), InvalidParameter);

  EXPECT_TRUE(IsStabilizable(M(2, 0, 0, 0.5), Col2(1, 0)));
  EXPECT_FALSE(IsStabilizable(M(2, 0, 0, 0.5), Col2(0, 1)));
  EXPECT_TRUE(IsStabilizable(M(0.5, 0, 0, 0.5), Col2(0, 0)));
  EXPECT_TRUE(IsDetectable(M(2, 0, 0, 0.5), M(1, 0, 0, 0)));
  EXPECT_FALSE(IsDetectable(M(2, 0, 0, 0.5), M(0, 0, 0, 1)));

  const Mat2 S = SqrtPsd(M(4, 0, 0, 9));
  EXPECT_LT((S - M(2, 0, 0, 3)).cwiseAbs().maxCoeff(), 1e-14);
  const Mat2 X = M(2, 1, 1, 2);
  EXPECT_LT((SqrtPsd(X) * SqrtPsd(X) - X).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StateCovariance, Examples) {
  EXPECT_LT((StateCovariance(Mat2::Zero(), Mat2::Identity()) - Mat2::Identity())
                .cwiseAbs().maxCoeff(), 1e-15);
  const Mat2 X = StateCovariance(M(0.5, 0, 0, 0), Mat2::Identity());
  EXPECT_NEAR(X(0, 0), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(X(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(X(0, 1), 0.0, 1e-14);
  EXPECT_THROW(StateCovariance(M(1.2, 0, 0, 0), Mat2::Identity()), InvalidParameter);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int k = 0; k < 100; ++k) {
    const Mat2 A = M(u(rng), u(rng), u(rng), u(rng));
    if (Radius(A) >= 0.95) continue;
    const Mat2 Z0 = M(2, 0.5, 0.5, 1);
    const Mat2 C = StateCovariance(A, Z0);
    EXPECT_LT((A * C * A.transpose() + Z0 - C).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((C - C.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(C.eigenvalues().real().minCoeff(), 0.0);
  }
}

TEST(SolveDareBestResponse, Examples) {
  auto br = SolveDareBestResponse(Mat2::Zero(), Col2(1, 1), Mat2::Identity(), 1.0);
  EXPECT_LT((br.P - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(br.K.cwiseAbs().maxCoeff(), 1e-15);

  const Mat2 A = M(0.5, 0, 0, 0.5);
  const Col2 B(1, 1);
  br = SolveDareBestResponse(A, B, Mat2::Identity(), 1.0);
  const Mat2& P = br.P;
  EXPECT_LT((P - P.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  const double s = 1.0 + B.dot(P * B);
  const Mat2 rhs = Mat2::Identity() + A.transpose() * P * A -
                   A.transpose() * P * B * (B.transpose() * P * A) / s;
  EXPECT_LT((rhs - P).cwiseAbs().maxCoeff(), 1e-10);
  const Row2 K = (B.transpose() * P * A) / s;
  EXPECT_LT((K - br.K).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(Radius(A - B * br.K), 1.0);

  EXPECT_THROW(SolveDareBestResponse(M(1.5, 0, 0, 0.2), Col2(0, 0), Mat2::Identity(), 1.0),
               SolverFailure);
}

TEST(LyapunovIterations, ZeroDynamics) {
  const LqGame g = MakeCensusGame(Mat2::Zero(), 0.1, 0.1);
  const auto sol = LyapunovIterations(g);
  EXPECT_LT(sol.policy.stacked().cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((sol.P1 - g.Q1).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((sol.P2 - g.Q2).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(sol.gradient_norm, 1e-10);
  EXPECT_EQ(sol.method, NashMethod::kBestResponse);
  const Vec4 grad = JointGradient(g, FeedbackPolicy{});
  EXPECT_LT(grad.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LyapunovIterations, DiagonalExample) {
  const LqGame g = MakeCensusGame(M(0.3, 0, 0, 0.3), 0.1, 0.1);
  const auto sol = LyapunovIterations(g);
  const Mat2 Acl = ClosedLoop(g, sol.policy);
  EXPECT_LT(Radius(Acl), 1.0);
  EXPECT_NEAR(sol.closed_loop_radius, Radius(Acl), 1e-12);
  for (int i = 0; i < 2; ++i) {
    const Mat2& P = i == 0 ? sol.P1 : sol.P2;
    const Row2 K = sol.policy.K(i);
    const Mat2 rhs = Acl.transpose() * P * Acl + K.transpose() * g.R(i) * K + g.Q(i);
    EXPECT_LT((P - rhs).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(sol.residuals[i], 1e-8);
  }
  EXPECT_LT(sol.gradient_norm, 1e-6);
}

TEST(LyapunovIterations, FailsWithoutControl) {
  LqGame g = MakeCensusGame(M(1.2, 0.3, 0.0, 1.1), 0.1, 0.1);
  g.B1 = Col2::Zero();
  g.B2 = Col2::Zero();
  EXPECT_THROW(LyapunovIterations(g), SolverFailure);
}

TEST(PolicyGradient, MatchesFiniteDifferencesOfCost) {
  std::mt19937_64 rng(12);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const auto [g, p] = RandomStablePolicy(rng);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(PlayerCost(g, p, i), SeriesCost(g, p, i),
                  1e-9 * (1 + std::abs(SeriesCost(g, p, i))));
      const Row2 grad = PolicyGradient(g, p, i);
      Row2 fd;
      for (int j = 0; j < 2; ++j) {
        FeedbackPolicy plus = p, minus = p;
        plus.K(i)[j] += h;
        minus.K(i)[j] -= h;
        fd[j] = (SeriesCost(g, plus, i) - SeriesCost(g, minus, i)) / (2 * h);
      }
      const double rel = (grad - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff());
      ASSERT_LT(rel, 1e-4) << "sample " << k << " player " << i;
    }
  }
}

TEST(PolicyGradient, RejectsUnstableLoop) {
  const LqGame g = MakeCensusGame(M(1.5, 0, 0, 1.5), 0.1, 0.1);
  EXPECT_THROW(PolicyGradient(g, FeedbackPolicy{}, 0), InvalidParameter);
}

TEST(GameJacobian, ZeroDynamicsBlocksAreAnalytic) {
  // With A = 0 and K = 0: P_i = Q_i, X = I, and the first-order changes of
  // P_i and X vanish, so D_Kj omega_i = 2 B_i' Q_i B_j I.
  const double q = 0.1;
  const LqGame g = MakeCensusGame(Mat2::Zero(), q, 0.1);
  const Mat4 J = GameJacobian(g, FeedbackPolicy{});
  Mat4 expected = Mat4::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double c = 2.0 * g.B(i).dot(g.Q(i) * g.B(j));
      if (i == j) c += 2.0 * g.R(i);
      expected.block<2, 2>(2 * i, 2 * j) = c * Mat2::Identity();
    }
  }
  EXPECT_LT((J - expected).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(expected(0, 2), 2.0, 1e-15);
  EXPECT_NEAR(expected(2, 0), 2.0 * q, 1e-15);
  const Mat2 J11 = J.block<2, 2>(0, 0), J22 = J.block<2, 2>(2, 2);
  EXPECT_GT(J11.eigenvalues().real().minCoeff(), 0.0);
  EXPECT_GT(J22.eigenvalues().real().minCoeff(), 0.0);
  EXPECT_EQ(ClassifySpectrum(J, 1e-6).outcome, Outcome::kLase);
  EXPECT_THROW(GameJacobian(g, FeedbackPolicy{}, 0.0), InvalidParameter);
}

TEST(GameJacobian, AsymmetricAndStepRobustAtNash) {
  CensusConfig cfg;
  cfg.seed = 99;
  int asymmetric = 0, compared = 0;
  for (int k = 0; k < 100; ++k) {
    const auto rec = CensusSample(cfg, k);
    if (rec.outcome == Outcome::kFailed) continue;
    const LqGame g = MakeCensusGame(rec.A, cfg.q, cfg.r);
    const auto sol = LyapunovIterations(g);
    const Mat4 J5 = GameJacobian(g, sol.policy, 1e-5);
    const Mat4 J4 = GameJacobian(g, sol.policy, 1e-4);
    asymmetric += (J5 - J5.transpose()).norm() > 1e-6;
    const auto s5 = ClassifySpectrum(J5, 1e-6);
    const auto s4 = ClassifySpectrum(J4, 1e-6);
    EXPECT_EQ(s5.outcome, s4.outcome) << "sample " << k;
    EXPECT_EQ(s5.outcome, rec.outcome);
    ++compared;
  }
  EXPECT_GT(compared, 90);
  EXPECT_EQ(asymmetric, compared);
}

TEST(ClassifySpectrum, Thresholds) {
  Mat4 J = Mat4::Identity();
  EXPECT_EQ(ClassifySpectrum(J, 1e-6).outcome, Outcome::kLase);
  J(3, 3) = -1;
  EXPECT_EQ(ClassifySpectrum(J, 1e-6).outcome, Outcome::kStrictSaddle);
  J(3, 3) = 1e-7;
  EXPECT_EQ(ClassifySpectrum(J, 1e-6).outcome, Outcome::kDegenerate);
  J(3, 3) = -1e-7;
  EXPECT_EQ(ClassifySpectrum(J, 1e-6).outcome, Outcome::kDegenerate);
  J = -Mat4::Identity();
  EXPECT_EQ(ClassifySpectrum(J, 1e-6).outcome, Outcome::kDegenerate);
}

TEST(Census, SolverSoundnessOnSampledGames) {
  CensusConfig cfg;
  cfg.seed = 2718;
  int solved = 0;
  for (int k = 0; k < 100; ++k) {
    const auto rec = CensusSample(cfg, k);
    if (rec.outcome == Outcome::kFailed) continue;
    const LqGame g = MakeCensusGame(rec.A, cfg.q, cfg.r);
    const auto sol = LyapunovIterations(g);
    EXPECT_LT(std::max(sol.residuals[0], sol.residuals[1]), 1e-8);
    EXPECT_LT(sol.gradient_norm, 1e-6);
    EXPECT_LT(sol.closed_loop_radius, 1.0);
    ++solved;
  }
  EXPECT_GT(solved, 90);
}

TEST(Census, DeterministicExclusiveAndValidated) {
  CensusConfig cfg;
  cfg.samples = 150;
  cfg.seed = 4;
  cfg.keep_records = true;
  const auto a = SampleCensus(cfg);
  const auto b = SampleCensus(cfg);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.strict_saddle + a.lase + a.degenerate + a.failed, cfg.samples);
  ASSERT_EQ(a.records.size(), 150u);
  int ss = 0;
  for (const auto& r : a.records) {
    ss += r.outcome == Outcome::kStrictSaddle;
    if (r.outcome == Outcome::kFailed) EXPECT_FALSE(r.failure.empty());
  }
  EXPECT_EQ(ss, a.strict_saddle);
  EXPECT_DOUBLE_EQ(a.frequency(),
                   static_cast<double>(a.strict_saddle) / (a.samples - a.failed));
  // Each sample is a pure function of (seed, index).
  const auto rec = CensusSample(cfg, 17);
  EXPECT_EQ(rec.A, a.records[17].A);
  EXPECT_EQ(rec.outcome, a.records[17].outcome);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_GT(rec.A(i, j), 0.0);
      EXPECT_LT(rec.A(i, j), 1.0);
    }
  }
  cfg.samples = 0;
  EXPECT_THROW(SampleCensus(cfg), InvalidParameter);
}

TEST(CensusSweep, SingleRepeatMatchesCensusCalls) {
  SweepConfig s;
  s.vary = SweepAxis::kR;
  s.grid = {0.2, 0.6};
  s.fixed_other = 0.05;
  s.samples = 40;
  s.repeats = 1;
  s.seed = 12;
  const auto points = CensusSweep(s);
  ASSERT_EQ(points.size(), 2u);
  for (std::size_t g = 0; g < 2; ++g) {
    CensusConfig c;
    c.q = 0.05;
    c.r = s.grid[g];
    c.samples = 40;
    c.seed = DeriveSeed(12, g);
    const auto direct = SampleCensus(c);
    ASSERT_EQ(points[g].runs.size(), 1u);
    EXPECT_TRUE(points[g].runs[0] == direct);
    EXPECT_DOUBLE_EQ(points[g].mean_frequency, direct.frequency());
  }
  s.grid = {0.0};
  EXPECT_THROW(CensusSweep(s), InvalidParameter);
}

TEST(ParseGrid, RangesAndLists) {
  const auto g = ParseGrid("0.05:1.0:10");
  ASSERT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.front(), 0.05);
  EXPECT_NEAR(g.back(), 0.905, 1e-15);
  for (double v : g) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_EQ(ParseGrid("0.1,0.5,0.9"), (std::vector<double>{0.1, 0.5, 0.9}));
  EXPECT_THROW(ParseGrid("0.1:0.5"), InvalidParameter);
  EXPECT_THROW(ParseGrid("0.1,x"), InvalidParameter);
  EXPECT_THROW(ParseGrid("0.5:0.1:3"), InvalidParameter);
}
