#include "gradplay/cycles.hpp"

#include <algorithm>
#include <cmath>

#include "gradplay/errors.hpp"

namespace gradplay {

namespace {

Vector Field(const Game& game, const Vector& x) {
  return -game.omega(game.profile(x));
}

}  // namespace

Vector FlowStep(const Game& game, const Vector& x, double dt) {
  const Vector k1 = Field(game, x);
  const Vector k2 = Field(game, x + 0.5 * dt * k1);
  const Vector k3 = Field(game, x + 0.5 * dt * k2);
  const Vector k4 = Field(game, x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector IntegrateFlow(const Game& game, const Vector& x0, double dt, long steps) {
  Vector x = x0;
  for (long k = 0; k < steps; ++k) x = FlowStep(game, x, dt);
  return x;
}

std::pair<Vector, Matrix> FlowWithMonodromy(const Game& game, const Vector& x0,
                                            double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw InvalidParameter("need dt > 0 and T >= 0");
  const int m = game.dimension();
  auto rhs = [&](const Vector& x, const Matrix& M) {
    const StrategyProfile p = game.profile(x);
    return std::pair<Vector, Matrix>(-game.omega(p), -game.jacobian(p) * M);
  };
  auto step = [&](Vector& x, Matrix& M, double h) {
    const auto [a1, b1] = rhs(x, M);
    const auto [a2, b2] = rhs(x + 0.5 * h * a1, M + 0.5 * h * b1);
    const auto [a3, b3] = rhs(x + 0.5 * h * a2, M + 0.5 * h * b2);
    const auto [a4, b4] = rhs(x + h * a3, M + h * b3);
    x += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    M += (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
  };
  Vector x = x0;
  Matrix M = Matrix::Identity(m, m);
  const long full = static_cast<long>(std::floor(T / dt));
  for (long k = 0; k < full; ++k) step(x, M, dt);
  const double rest = T - full * dt;
  if (rest > 0.0) step(x, M, rest);
  return {x, M};
}

const char* CycleStabilityName(CycleStability s) {
  switch (s) {
    case CycleStability::kLinearlyStable: return "linearly_stable";
    case CycleStability::kLinearlyUnstable: return "linearly_unstable";
    case CycleStability::kNonHyperbolic: return "non_hyperbolic";
  }
  return "unknown";
}

void CycleOptions::validate() const {
  if (!(dt > 0.0)) throw InvalidParameter("cycle detection needs dt > 0");
  if (!(t_max > 0.0)) throw InvalidParameter("cycle detection needs t_max > 0");
  if (!(t_transient >= 0.0)) throw InvalidParameter("t_transient must be >= 0");
  if (!(anchor_tol > 0.0) || !(min_speed > 0.0) || !(unit_tol > 0.0)) {
    throw InvalidParameter("cycle tolerances must be > 0");
  }
}

std::optional<CycleReport> DetectLimitCycle(const Game& game,
                                            const StrategyProfile& x0,
                                            const CycleOptions& options) {
  options.validate();
  const double dt = options.dt;
  Vector x = x0.values();
  double t = 0.0;
  for (; t + dt <= options.t_transient; t += dt) x = FlowStep(game, x, dt);

  Vector anchor = x;
  double t_anchor = t;
  Vector normal;
  auto place_anchor = [&](const Vector& at, double when) {
    const Vector f = Field(game, at);
    const double speed = f.norm();
    if (!(speed > options.min_speed)) return false;
    anchor = at;
    t_anchor = when;
    normal = f / speed;
    return true;
  };
  if (!place_anchor(x, t)) return std::nullopt;

  auto section = [&](const Vector& p) { return normal.dot(p - anchor); };
  double s_prev = 0.0;
  while (t < options.t_max) {
    const Vector next = FlowStep(game, x, dt);
    if (!next.allFinite()) return std::nullopt;
    const double s_next = section(next);
    if (s_prev < 0.0 && s_next >= 0.0) {
      // Refine the crossing inside this step by bisection on the substep.
      double lo = 0.0, hi = dt;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (section(FlowStep(game, x, mid)) < 0.0 ? lo : hi) = mid;
      }
      const double tau = 0.5 * (lo + hi);
      const Vector hit = FlowStep(game, x, tau);
      const double t_hit = t + tau;
      if ((hit - anchor).norm() <= options.anchor_tol * (1.0 + anchor.norm())) {
        const double period = t_hit - t_anchor;
        const auto [end, M] = FlowWithMonodromy(game, anchor, period, dt);
        CycleReport report;
        report.period = period;
        report.anchor_point = game.profile(anchor);
        report.multipliers = SortedEigenvalues(M);
        auto trivial = std::min_element(
            report.multipliers.begin(), report.multipliers.end(),
            [](const Complex& a, const Complex& b) {
              return std::abs(a - 1.0) < std::abs(b - 1.0);
            });
        report.trivial_multiplier = *trivial;
        for (auto it = report.multipliers.begin(); it != report.multipliers.end(); ++it) {
          if (it != trivial) report.characteristic_multipliers.push_back(*it);
        }
        bool outside = false, on_circle = false;
        for (const auto& mu : report.characteristic_multipliers) {
          const double r = std::abs(mu);
          if (r > 1.0 + options.unit_tol) outside = true;
          else if (r >= 1.0 - options.unit_tol) on_circle = true;
        }
        report.classification = outside     ? CycleStability::kLinearlyUnstable
                                : on_circle ? CycleStability::kNonHyperbolic
                                            : CycleStability::kLinearlyStable;
        return report;
      }
      // Not yet on the cycle: restart from the crossing point.
      if (!place_anchor(hit, t_hit)) return std::nullopt;
      x = hit;
      t = t_hit;
      s_prev = 0.0;
      continue;
    }
    x = next;
    t += dt;
    s_prev = s_next;
    if (!(Field(game, x).norm() > options.min_speed)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace gradplay
