#include "gradplay/game.hpp"

#include <algorithm>
#include <cmath>

#include "gradplay/errors.hpp"

namespace gradplay {

Game::Game(PlayerDims dims, std::vector<PolynomialCost> costs,
           std::string label)
    : dims_(std::move(dims)), costs_(std::move(costs)), label_(std::move(label)) {
  if (dims_.players() < 2) throw InvalidParameter("a game needs n >= 2 players");
  if (static_cast<int>(costs_.size()) != dims_.players()) {
    throw DimensionError("number of costs must equal number of players");
  }
  const int m = dims_.total();
  for (const auto& c : costs_) {
    if (c.num_vars() != m) {
      throw DimensionError("cost must be a function of the full joint variable");
    }
  }
  omega_terms_.reserve(m);
  jacobian_terms_.resize(m);
  for (int i = 0; i < players(); ++i) {
    for (int k = dims_.offset(i); k < dims_.offset(i) + dims_.size(i); ++k) {
      omega_terms_.push_back(costs_[i].derivative(k));
      auto& row = jacobian_terms_[k];
      row.reserve(m);
      for (int c = 0; c < m; ++c) row.push_back(omega_terms_.back().derivative(c));
    }
  }
}

void Game::check(const StrategyProfile& x) const {
  if (!(x.dims() == dims_)) {
    throw DimensionError("strategy profile does not conform to game dims");
  }
}

double Game::cost(int player, const StrategyProfile& x) const {
  check(x);
  if (player < 0 || player >= players()) {
    throw InvalidParameter("player index out of range");
  }
  return costs_[player](x.values());
}

Vector Game::omega(const StrategyProfile& x) const {
  check(x);
  const int m = dimension();
  Vector out(m);
  for (int r = 0; r < m; ++r) out[r] = omega_terms_[r](x.values());
  return out;
}

Matrix Game::jacobian(const StrategyProfile& x) const {
  check(x);
  const int m = dimension();
  Matrix out(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) out(r, c) = jacobian_terms_[r][c](x.values());
  }
  return out;
}

FiniteDifferenceReport FiniteDifferenceCheck(const Game& game,
                                             const StrategyProfile& x,
                                             double h) {
  if (!(h > 0.0)) throw InvalidParameter("finite-difference step must be > 0");
  const int m = game.dimension();
  const Vector w = game.omega(x);
  const Matrix J = game.jacobian(x);
  FiniteDifferenceReport report;

  auto shifted = [&](int k, double step) {
    Vector v = x.values();
    v[k] += step;
    return game.profile(v);
  };
  for (int k = 0; k < m; ++k) {
    if (x[k] + h == x[k] || x[k] - h == x[k]) report.step_warning = true;
  }

  // Gradient: each player differentiates only their own cost.
  Vector fd_grad(m);
  for (int i = 0; i < game.players(); ++i) {
    const auto& d = game.dims();
    for (int k = d.offset(i); k < d.offset(i) + d.size(i); ++k) {
      fd_grad[k] = (game.cost(i, shifted(k, h)) - game.cost(i, shifted(k, -h))) /
                   (2.0 * h);
    }
  }
  Matrix fd_jac(m, m);
  for (int c = 0; c < m; ++c) {
    fd_jac.col(c) =
        (game.omega(shifted(c, h)) - game.omega(shifted(c, -h))) / (2.0 * h);
  }

  report.gradient_error = (fd_grad - w).cwiseAbs().maxCoeff() /
                          std::max(1.0, w.cwiseAbs().maxCoeff());
  report.jacobian_error = (fd_jac - J).cwiseAbs().maxCoeff() /
                          std::max(1.0, J.cwiseAbs().maxCoeff());
  return report;
}

}  // namespace gradplay
