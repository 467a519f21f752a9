#pragma once

#include <optional>
#include <vector>

#include "gradplay/equilibria.hpp"
#include "gradplay/game.hpp"

namespace gradplay {

/// One classical RK4 step of the gradient flow x' = -omega(x).
Vector FlowStep(const Game& game, const Vector& x, double dt);

/// `steps` RK4 steps of size dt from x0.
Vector IntegrateFlow(const Game& game, const Vector& x0, double dt, long steps);

/// Flow map and its linearization over time T: returns (x(T), M(T)) where
/// M' = -D omega(x(t)) M, M(0) = I.
std::pair<Vector, Matrix> FlowWithMonodromy(const Game& game, const Vector& x0,
                                            double T, double dt);

enum class CycleStability { kLinearlyStable, kLinearlyUnstable, kNonHyperbolic };

const char* CycleStabilityName(CycleStability s);

struct CycleOptions {
  double dt = 1e-3;
  double t_max = 200.0;
  /// Flow time discarded before the first anchor is placed.
  double t_transient = 0.0;
  /// A section return within anchor_tol * (1 + ||anchor||) of the anchor
  /// counts as recurrence.
  double anchor_tol = 1e-4;
  /// Flow speeds ||omega|| below this mean the orbit has settled on an
  /// equilibrium.
  double min_speed = 1e-8;
  /// Multipliers with | |mu| - 1 | <= unit_tol count as on the unit circle.
  double unit_tol = 1e-3;

  void validate() const;
};

struct CycleReport {
  double period = 0.0;
  StrategyProfile anchor_point;
  std::vector<Complex> multipliers;   // all eigenvalues of the monodromy matrix
  Complex trivial_multiplier;         // the one removed (closest to 1)
  std::vector<Complex> characteristic_multipliers;  // the rest
  CycleStability classification = CycleStability::kNonHyperbolic;
};

/// Integrates the flow from x0, repeatedly placing an anchor on a section
/// orthogonal to the flow and following the orbit to its next crossing in the
/// same direction. When a crossing lands on its anchor, the crossing time is
/// the period and the monodromy matrix over one period gives the
/// multipliers. Returns nullopt if no recurrence appears before t_max; that
/// is absence of detection, not proof of absence.
std::optional<CycleReport> DetectLimitCycle(const Game& game,
                                            const StrategyProfile& x0,
                                            const CycleOptions& options = {});

}  // namespace gradplay
