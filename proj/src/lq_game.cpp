#include "gradplay/lq_game.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gradplay/errors.hpp"

namespace gradplay::lq {

namespace {

bool IsPositiveDefinite(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff() > 0.0;
}

// Solves X = F X G' + W for 2x2 matrices via the 4x4 Kronecker system
// (I - G (x) F) vec(X) = vec(W).
Mat2 SolveStein(const Mat2& F, const Mat2& G, const Mat2& W) {
  Mat4 M = Mat4::Identity();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      M.block<2, 2>(2 * a, 2 * b) -= G(a, b) * F;
  Vec4 w(W(0, 0), W(1, 0), W(0, 1), W(1, 1));
  Vec4 x = M.partialPivLu().solve(w);
  Mat2 X;
  X << x[0], x[2], x[1], x[3];
  return 0.5 * (X + X.transpose());
}

void RequireStable(const Mat2& A_cl, const char* what) {
  if (!(SpectralRadius(A_cl) < 1.0)) {
    throw InvalidParameter(std::string(what) +
                           ": closed loop is not Schur stable");
  }
}

}  // namespace

void LqGame::validate() const {
  if (!IsPositiveDefinite(Q1) || !IsPositiveDefinite(Q2)) {
    throw InvalidParameter("LQ game requires Q_i positive definite");
  }
  if (!(R1 > 0.0) || !(R2 > 0.0)) {
    throw InvalidParameter("LQ game requires R_i > 0");
  }
  if (!IsPositiveDefinite(Z0)) {
    throw InvalidParameter("LQ game requires Z0 positive definite");
  }
}

Vec4 FeedbackPolicy::stacked() const {
  return Vec4(K1[0], K1[1], K2[0], K2[1]);
}

FeedbackPolicy FeedbackPolicy::FromStacked(const Vec4& k) {
  FeedbackPolicy p;
  p.K1 << k[0], k[1];
  p.K2 << k[2], k[3];
  return p;
}

Mat2 ClosedLoop(const LqGame& game, const FeedbackPolicy& policy) {
  return game.A - game.B1 * policy.K1 - game.B2 * policy.K2;
}

double SpectralRadius(const Mat2& m) {
  // Closed form for 2x2: roots of l^2 - tr l + det.
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = 0.25 * tr * tr - det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return std::max(std::abs(0.5 * tr + s), std::abs(0.5 * tr - s));
  }
  return std::sqrt(std::max(det, 0.0));
}

namespace {

template <typename Fn>
bool PbhHolds(const Mat2& A, Fn&& rank_full) {
  Eigen::EigenSolver<Mat2> es(A, false);
  for (int k = 0; k < 2; ++k) {
    const std::complex<double> lambda = es.eigenvalues()[k];
    if (std::abs(lambda) < 1.0) continue;
    if (!rank_full(lambda)) return false;
  }
  return true;
}

}  // namespace

bool IsStabilizable(const Mat2& A, const Col2& B) {
  return PbhHolds(A, [&](std::complex<double> lambda) {
    Eigen::Matrix<std::complex<double>, 2, 3> M;
    M.leftCols<2>() = A.cast<std::complex<double>>() -
                      lambda * Eigen::Matrix2cd::Identity();
    M.col(2) = B.cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::Matrix<std::complex<double>, 2, 3>> lu(M);
    lu.setThreshold(1e-10);
    return lu.rank() == 2;
  });
}

bool IsDetectable(const Mat2& A, const Mat2& C) {
  return PbhHolds(A, [&](std::complex<double> lambda) {
    Eigen::Matrix<std::complex<double>, 4, 2> M;
    M.topRows<2>() = A.cast<std::complex<double>>() -
                     lambda * Eigen::Matrix2cd::Identity();
    M.bottomRows<2>() = C.cast<std::complex<double>>();
    Eigen::FullPivLU<Eigen::Matrix<std::complex<double>, 4, 2>> lu(M);
    lu.setThreshold(1e-10);
    return lu.rank() == 2;
  });
}

Mat2 SqrtPsd(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (m + m.transpose()));
  return es.operatorSqrt();
}

BestResponse SolveDareBestResponse(const Mat2& A_eff, const Col2& B,
                                   const Mat2& Q, double R, double tol,
                                   int max_iters) {
  if (!IsStabilizable(A_eff, B)) {
    throw SolverFailure("best response: (A, B) is not stabilizable",
                        std::numeric_limits<double>::infinity());
  }
  auto gain = [&](const Mat2& P) -> Row2 {
    const double s = R + B.dot(P * B);
    return (B.transpose() * P * A_eff) / s;
  };
  auto riccati = [&](const Mat2& P) -> Mat2 {
    const Mat2 next = Q + A_eff.transpose() * P * A_eff -
                      A_eff.transpose() * P * B * gain(P);
    return 0.5 * (next + next.transpose());
  };

  BestResponse out;
  Mat2 P = Q;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    const Mat2 next = riccati(P);
    change = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (!std::isfinite(change)) break;
    if (change <= tol * (1.0 + P.cwiseAbs().maxCoeff())) {
      out.iterations = it;
      out.P = P;
      out.K = gain(P);
      out.residual = (riccati(P) - P).cwiseAbs().maxCoeff();
      return out;
    }
  }
  throw SolverFailure("best response: Riccati recursion did not converge",
                      change);
}

Mat2 StateCovariance(const Mat2& A_cl, const Mat2& Z0) {
  RequireStable(A_cl, "state covariance");
  return SolveStein(A_cl, A_cl, Z0);
}

Mat2 CostToGo(const Mat2& A_cl, const Mat2& W) {
  RequireStable(A_cl, "cost to go");
  return SolveStein(A_cl.transpose(), A_cl.transpose(), W);
}

Mat2 PlayerValue(const LqGame& game, const FeedbackPolicy& policy,
                 int player) {
  const Row2& K = policy.K(player);
  const Mat2 W = game.Q(player) + game.R(player) * K.transpose() * K;
  return CostToGo(ClosedLoop(game, policy), W);
}

double PlayerCost(const LqGame& game, const FeedbackPolicy& policy,
                  int player) {
  return (PlayerValue(game, policy, player) * game.Z0).trace();
}

double RiccatiResidual(const LqGame& game, const FeedbackPolicy& policy,
                       int player, const Mat2& P) {
  const Mat2 A_cl = ClosedLoop(game, policy);
  const Row2& K = policy.K(player);
  const Mat2 rhs = A_cl.transpose() * P * A_cl +
                   game.R(player) * K.transpose() * K + game.Q(player);
  return (P - rhs).cwiseAbs().maxCoeff();
}

Row2 PolicyGradient(const LqGame& game, const FeedbackPolicy& policy,
                    int player) {
  const Mat2 A_cl = ClosedLoop(game, policy);
  RequireStable(A_cl, "policy gradient");
  const Mat2 X = StateCovariance(A_cl, game.Z0);
  const Mat2 P = PlayerValue(game, policy, player);
  const Col2& B = game.B(player);
  const Mat2 BK = game.B1 * policy.K1 + game.B2 * policy.K2;
  const Row2 factor = game.R(player) * policy.K(player) +
                      B.transpose() * P * BK - B.transpose() * P * game.A;
  return 2.0 * factor * X;
}

Vec4 JointGradient(const LqGame& game, const FeedbackPolicy& policy) {
  const Row2 g1 = PolicyGradient(game, policy, 0);
  const Row2 g2 = PolicyGradient(game, policy, 1);
  return Vec4(g1[0], g1[1], g2[0], g2[1]);
}

namespace {

double BestResponseGap(const LqGame& game, const FeedbackPolicy& policy,
                       const NashOptions& options) {
  const BestResponse br1 = SolveDareBestResponse(
      game.A - game.B2 * policy.K2, game.B1, game.Q1, game.R1,
      options.dare_tol, options.dare_max_iters);
  const BestResponse br2 = SolveDareBestResponse(
      game.A - game.B1 * policy.K1, game.B2, game.Q2, game.R2,
      options.dare_tol, options.dare_max_iters);
  return std::max((br1.K - policy.K1).cwiseAbs().maxCoeff(),
                  (br2.K - policy.K2).cwiseAbs().maxCoeff());
}

// Damped Newton on omega(K) = 0 inside the stabilizing set.
bool NewtonRoot(const LqGame& game, FeedbackPolicy& policy,
                const NashOptions& options) {
  for (int it = 0; it < options.newton_max_iters; ++it) {
    const Vec4 w = JointGradient(game, policy);
    const double norm = w.norm();
    if (norm <= options.newton_tol) return true;
    Mat4 J;
    try {
      J = GameJacobian(game, policy, 1e-6);
    } catch (const ConditioningError&) {
      return false;
    }
    const Vec4 step = J.fullPivLu().solve(w);
    if (!step.allFinite()) return false;
    bool accepted = false;
    double alpha = 1.0;
    for (int halving = 0; halving < 40 && !accepted; ++halving, alpha *= 0.5) {
      const auto trial = FeedbackPolicy::FromStacked(policy.stacked() - alpha * step);
      if (!(SpectralRadius(ClosedLoop(game, trial)) < 1.0)) continue;
      if (JointGradient(game, trial).norm() < (1.0 - 1e-4 * alpha) * norm) {
        policy = trial;
        accepted = true;
      }
    }
    if (!accepted) return false;
  }
  return JointGradient(game, policy).norm() <= options.newton_tol;
}

bool NewtonFallback(const LqGame& game,
                    const std::vector<FeedbackPolicy>& seeds,
                    const NashOptions& options, LqNashSolution& out) {
  for (const auto& seed : seeds) {
    FeedbackPolicy candidate = seed;
    try {
      if (!NewtonRoot(game, candidate, options)) continue;
      if (BestResponseGap(game, candidate, options) > options.nash_check_tol) {
        continue;
      }
    } catch (const Error&) {
      continue;
    }
    out.policy = candidate;
    out.method = NashMethod::kNewtonPolish;
    out.iterations = options.max_iters;
    return true;
  }
  return false;
}

}  // namespace

LqNashSolution LyapunovIterations(const LqGame& game,
                                  const NashOptions& options) {
  game.validate();
  const auto assumption_holds = [&](int player) {
    return IsStabilizable(game.A, game.B(player)) &&
           IsDetectable(game.A, SqrtPsd(game.Q(player)));
  };
  if (!assumption_holds(0) && !assumption_holds(1)) {
    throw SolverFailure(
        "Nash solver: neither (A, B_i, sqrt(Q_i)) is stabilizable-detectable",
        std::numeric_limits<double>::infinity());
  }

  LqNashSolution out;
  FeedbackPolicy& policy = out.policy;
  double change = std::numeric_limits<double>::infinity();
  std::vector<FeedbackPolicy> seeds;
  for (int it = 1; it <= options.max_iters; ++it) {
    BestResponse br1, br2;
    try {
      br1 = SolveDareBestResponse(game.A - game.B2 * policy.K2, game.B1,
                                  game.Q1, game.R1, options.dare_tol,
                                  options.dare_max_iters);
      br2 = SolveDareBestResponse(game.A - game.B1 * br1.K, game.B2, game.Q2,
                                  game.R2, options.dare_tol,
                                  options.dare_max_iters);
    } catch (const SolverFailure& e) {
      // Best responses ran away from the stabilizing region.
      change = e.residual();
      break;
    }
    change = std::max((br1.K - policy.K1).cwiseAbs().maxCoeff(),
                      (br2.K - policy.K2).cwiseAbs().maxCoeff());
    policy.K1 = br1.K;
    policy.K2 = br2.K;
    if (it <= 8 || it % 25 == 0) seeds.push_back(policy);
    if (change <= options.tol) {
      out.method = NashMethod::kBestResponse;
      out.iterations = it;
      break;
    }
  }
  if (out.iterations == 0) {
    if (!options.newton_fallback || !NewtonFallback(game, seeds, options, out)) {
      throw SolverFailure("Nash solver: best responses did not settle", change);
    }
  }

  const Mat2 A_cl = ClosedLoop(game, policy);
  out.closed_loop_radius = SpectralRadius(A_cl);
  if (!(out.closed_loop_radius < 1.0)) {
    throw SolverFailure("Nash solver: closed loop is unstable",
                        out.closed_loop_radius);
  }
  out.P1 = PlayerValue(game, policy, 0);
  out.P2 = PlayerValue(game, policy, 1);
  out.residuals = {RiccatiResidual(game, policy, 0, out.P1),
                   RiccatiResidual(game, policy, 1, out.P2)};
  out.gradient_norm = JointGradient(game, policy).norm();
  return out;
}

Mat4 GameJacobian(const LqGame& game, const FeedbackPolicy& policy, double h) {
  if (!(h > 0.0)) throw InvalidParameter("Jacobian step must be > 0");
  const Vec4 k0 = policy.stacked();
  auto attempt = [&](double step, Mat4& J) {
    for (int j = 0; j < 4; ++j) {
      Vec4 plus = k0, minus = k0;
      plus[j] += step;
      minus[j] -= step;
      const auto pp = FeedbackPolicy::FromStacked(plus);
      const auto pm = FeedbackPolicy::FromStacked(minus);
      if (!(SpectralRadius(ClosedLoop(game, pp)) < 1.0) ||
          !(SpectralRadius(ClosedLoop(game, pm)) < 1.0)) {
        return false;
      }
      J.col(j) = (JointGradient(game, pp) - JointGradient(game, pm)) /
                 (2.0 * step);
    }
    return true;
  };
  Mat4 J;
  if (attempt(h, J) || attempt(0.1 * h, J)) return J;
  throw ConditioningError(
      "LQ Jacobian: perturbed gains destabilize the closed loop");
}

}  // namespace gradplay::lq
