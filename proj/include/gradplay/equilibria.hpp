#pragma once

#include <complex>
#include <vector>

#include "gradplay/game.hpp"

namespace gradplay {

using Complex = std::complex<double>;

/// Eigenvalues of a dense real matrix sorted by ascending real part (ties by
/// ascending imaginary part).
std::vector<Complex> SortedEigenvalues(const Matrix& m);

struct EquilibriumFlags {
  bool is_critical = false;
  bool is_dne = false;             // differential Nash
  bool is_nddne = false;           // non-degenerate differential Nash
  bool is_lase = false;            // locally asymptotically stable
  bool is_strict_saddle = false;
  /// LASE that fails the differential Nash conditions (non-Nash attractor).
  bool is_nash_candidate_violation = false;
  /// Critical point with an eigenvalue on the imaginary axis (within
  /// tolerance); left unclassified.
  bool is_degenerate = false;
};

struct CriticalPointReport {
  StrategyProfile point;
  double omega_norm = 0.0;
  std::vector<Complex> eigenvalues;  // ascending real part
  std::vector<bool> block_definiteness;
  double det_jacobian = 0.0;
  double tol = 0.0;
  /// tol * (1 + max|D omega_ij|): eigenvalue real parts at or below this in
  /// magnitude count as zero.
  double zero_threshold = 0.0;
  EquilibriumFlags flags;

  double min_real() const { return eigenvalues.front().real(); }
  double max_real() const { return eigenvalues.back().real(); }
};

/// Classifies x against the equilibrium taxonomy. A point with
/// ||omega(x)|| > tol gets is_critical = false and no equilibrium flags.
CriticalPointReport Classify(const Game& game, const StrategyProfile& x,
                             double tol = 1e-9);

struct CriticalPointSearchConfig {
  std::vector<StrategyProfile> seeds;
  int newton_max_iters = 100;
  double newton_tol = 1e-12;
  double dedup_radius = 1e-6;

  void validate() const;
};

/// Seeds on a regular grid with `per_axis` points per coordinate over
/// [lo, hi]^m.
std::vector<StrategyProfile> GridSeeds(const Game& game, double lo, double hi,
                                       int per_axis);

/// Damped Newton on omega from each seed (gradient-norm descent where
/// D omega is near singular). Returns the distinct converged points in
/// lexicographic order; an empty list when no seed converges.
std::vector<StrategyProfile> FindCriticalPoints(
    const Game& game, const CriticalPointSearchConfig& config);

/// True iff ||D omega(x) - D omega(x)'||_max <= tol at every sample point.
bool IsPotentialGame(const Game& game,
                     const std::vector<StrategyProfile>& sample_points,
                     double tol = 1e-12);

/// Classifies the origin of MakeQuadraticZeroSum(a, b, c) and returns its
/// LASE flag. Requires the origin to be a differential Nash point
/// (a > 0, c < 0).
bool ZeroSumDneImpliesLaseCheck(double a, double b, double c);

}  // namespace gradplay
