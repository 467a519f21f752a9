#pragma once

#include <string>
#include <vector>

#include "gradplay/polynomial.hpp"
#include "gradplay/profile.hpp"

namespace gradplay {

/// n-player continuous game with polynomial costs f_1..f_n over the joint
/// strategy space. Immutable after construction; the derivative polynomials
/// for omega and the game Jacobian are built once up front.
class Game {
 public:
  Game(PlayerDims dims, std::vector<PolynomialCost> costs,
       std::string label = "custom");

  const PlayerDims& dims() const { return dims_; }
  int players() const { return dims_.players(); }
  int dimension() const { return dims_.total(); }
  const std::vector<PolynomialCost>& costs() const { return costs_; }
  const std::string& label() const { return label_; }

  /// f_i(x) for the 0-based player index.
  double cost(int player, const StrategyProfile& x) const;

  /// Simultaneous gradient (D_1 f_1, ..., D_n f_n) at x.
  Vector omega(const StrategyProfile& x) const;

  /// D omega(x); row-block i holds the derivative of D_i f_i.
  Matrix jacobian(const StrategyProfile& x) const;

  /// Profile wrapper for a raw joint vector with this game's dims.
  StrategyProfile profile(const Vector& values) const {
    return StrategyProfile(values, dims_);
  }

 private:
  void check(const StrategyProfile& x) const;

  PlayerDims dims_;
  std::vector<PolynomialCost> costs_;
  std::string label_;
  std::vector<PolynomialCost> omega_terms_;                  // m entries
  std::vector<std::vector<PolynomialCost>> jacobian_terms_;  // m x m
};

struct FiniteDifferenceReport {
  double gradient_error = 0.0;
  double jacobian_error = 0.0;
  /// Set when some coordinate is unchanged by the +/-h perturbation, in which
  /// case the errors above are meaningless.
  bool step_warning = false;
};

/// Max relative error of the analytic omega / D omega against central
/// differences of the costs / of omega.
FiniteDifferenceReport FiniteDifferenceCheck(const Game& game,
                                             const StrategyProfile& x,
                                             double h);

}  // namespace gradplay
