#pragma once

#include <array>

#include <Eigen/Dense>

namespace gradplay::lq {

// Two-player discrete-time LQ game on a 2-dimensional state with scalar
// inputs:
//   z(t+1) = A z(t) + B1 u1(t) + B2 u2(t),   u_i = -K_i z,
//   f_i = E sum_t z' Q_i z + u_i' R_i u_i,    E[z(0) z(0)'] = Z0.

using Mat2 = Eigen::Matrix2d;
using Col2 = Eigen::Vector2d;
using Row2 = Eigen::RowVector2d;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

struct LqGame {
  Mat2 A = Mat2::Zero();
  Col2 B1 = Col2::Zero();
  Col2 B2 = Col2::Zero();
  Mat2 Q1 = Mat2::Identity();
  Mat2 Q2 = Mat2::Identity();
  double R1 = 1.0;
  double R2 = 1.0;
  Mat2 Z0 = Mat2::Identity();

  const Col2& B(int player) const { return player == 0 ? B1 : B2; }
  const Mat2& Q(int player) const { return player == 0 ? Q1 : Q2; }
  double R(int player) const { return player == 0 ? R1 : R2; }

  /// Throws InvalidParameter unless Q_i > 0, R_i > 0, Z0 > 0.
  void validate() const;
};

/// Feedback gains u_i = -K_i z.
struct FeedbackPolicy {
  Row2 K1 = Row2::Zero();
  Row2 K2 = Row2::Zero();

  const Row2& K(int player) const { return player == 0 ? K1 : K2; }
  Row2& K(int player) { return player == 0 ? K1 : K2; }

  /// Joint gain vector (K1 row-major, then K2 row-major).
  Vec4 stacked() const;
  static FeedbackPolicy FromStacked(const Vec4& k);
};

Mat2 ClosedLoop(const LqGame& game, const FeedbackPolicy& policy);

double SpectralRadius(const Mat2& m);

/// PBH test: rank [A - lambda I, B] = n for every |lambda| >= 1.
bool IsStabilizable(const Mat2& A, const Col2& B);

/// PBH test on (A, C): rank [A - lambda I; C] = n for every |lambda| >= 1.
bool IsDetectable(const Mat2& A, const Mat2& C);

/// Principal square root of a symmetric PSD matrix.
Mat2 SqrtPsd(const Mat2& m);

struct BestResponse {
  Row2 K;
  Mat2 P;
  double residual = 0.0;
  int iterations = 0;
};

/// Single-player discrete LQR: fixed point of
///   P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA,   K = (R + B'PB)^-1 B'PA.
/// Throws SolverFailure for a non-stabilizable pair or when the recursion
/// does not settle within max_iters.
BestResponse SolveDareBestResponse(const Mat2& A_eff, const Col2& B,
                                   const Mat2& Q, double R, double tol = 1e-12,
                                   int max_iters = 100000);

/// X = A_cl X A_cl' + Z0 (the second moment sum_t z(t) z(t)').
/// Throws InvalidParameter when A_cl is not Schur stable.
Mat2 StateCovariance(const Mat2& A_cl, const Mat2& Z0);

/// P = A_cl' P A_cl + W (player cost-to-go for fixed gains).
Mat2 CostToGo(const Mat2& A_cl, const Mat2& W);

/// P_i from P_i = A_cl' P_i A_cl + K_i' R_i K_i + Q_i.
Mat2 PlayerValue(const LqGame& game, const FeedbackPolicy& policy, int player);

/// Expected cost trace(P_i Z0).
double PlayerCost(const LqGame& game, const FeedbackPolicy& policy, int player);

/// max-norm residual of P_i against its defining equation.
double RiccatiResidual(const LqGame& game, const FeedbackPolicy& policy,
                       int player, const Mat2& P);

/// Gradient of player i's cost trace(P_i Z0) in their own gains:
///   2 (R_i K_i + B_i' P_i (B1 K1 + B2 K2) - B_i' P_i A) X,
/// with X the state covariance. Throws InvalidParameter on an unstable loop.
Row2 PolicyGradient(const LqGame& game, const FeedbackPolicy& policy,
                    int player);

/// omega(K1, K2): both players' gradients stacked in FeedbackPolicy::stacked
/// order.
Vec4 JointGradient(const LqGame& game, const FeedbackPolicy& policy);

struct NashOptions {
  double tol = 1e-10;  // max change of any gain entry
  int max_iters = 500;
  double dare_tol = 1e-12;
  int dare_max_iters = 100000;
  /// When best responses do not settle, search for a root of omega seeded by
  /// the best-response iterates and accept it only if each gain is a best
  /// response to the other (within nash_check_tol).
  bool newton_fallback = true;
  int newton_max_iters = 60;
  double newton_tol = 1e-11;
  double nash_check_tol = 1e-8;
};

enum class NashMethod { kBestResponse, kNewtonPolish };

struct LqNashSolution {
  FeedbackPolicy policy;
  NashMethod method = NashMethod::kBestResponse;
  Mat2 P1 = Mat2::Zero();
  Mat2 P2 = Mat2::Zero();
  int iterations = 0;
  std::array<double, 2> residuals{};
  double gradient_norm = 0.0;
  double closed_loop_radius = 0.0;
};

/// Feedback Nash gains by alternating best responses: player 1 responds to
/// K2 (starting from K2 = 0), then player 2 to the new K1, until neither
/// gain moves by more than tol. Nash points that repel the best-response map
/// are reached through the Newton fallback (see NashOptions). Throws
/// SolverFailure on non-convergence or when neither (A, B_i, sqrt(Q_i)) is
/// stabilizable-detectable.
LqNashSolution LyapunovIterations(const LqGame& game,
                                  const NashOptions& options = {});

/// Central-difference Jacobian of JointGradient over the stacked gains.
/// If a perturbed policy destabilizes the loop the step is reduced 10x once;
/// a second failure throws ConditioningError.
Mat4 GameJacobian(const LqGame& game, const FeedbackPolicy& policy,
                  double h = 1e-5);

}  // namespace gradplay::lq
