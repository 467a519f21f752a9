#include "gradplay/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gradplay/errors.hpp"
#include "gradplay/families.hpp"

namespace gradplay {

std::vector<Complex> SortedEigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) {
    throw ConditioningError("eigenvalue iteration did not converge");
  }
  std::vector<Complex> out(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

CriticalPointReport Classify(const Game& game, const StrategyProfile& x,
                             double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("classification tolerance must be > 0");
  CriticalPointReport report;
  report.point = x;
  report.tol = tol;
  report.omega_norm = game.omega(x).norm();
  const Matrix J = game.jacobian(x);
  report.eigenvalues = SortedEigenvalues(J);
  report.det_jacobian = J.determinant();
  report.zero_threshold = tol * (1.0 + J.cwiseAbs().maxCoeff());
  const double thr = report.zero_threshold;

  const auto& dims = game.dims();
  for (int i = 0; i < game.players(); ++i) {
    const Matrix block =
        J.block(dims.offset(i), dims.offset(i), dims.size(i), dims.size(i));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (block + block.transpose()),
                                             Eigen::EigenvaluesOnly);
    report.block_definiteness.push_back(es.eigenvalues().minCoeff() > thr);
  }

  auto& f = report.flags;
  f.is_critical = report.omega_norm <= tol;
  if (!f.is_critical) return report;

  bool any_neg = false, any_pos = false, any_zero = false;
  for (const auto& l : report.eigenvalues) {
    if (l.real() < -thr) any_neg = true;
    else if (l.real() > thr) any_pos = true;
    else any_zero = true;
  }
  const bool blocks_pd =
      std::all_of(report.block_definiteness.begin(),
                  report.block_definiteness.end(), [](bool b) { return b; });
  f.is_degenerate = any_zero;
  f.is_dne = blocks_pd;
  f.is_nddne = f.is_dne && std::abs(report.det_jacobian) > thr;
  f.is_lase = !any_zero && !any_neg;
  f.is_strict_saddle = !any_zero && any_neg && any_pos;
  f.is_nash_candidate_violation = f.is_lase && !f.is_dne;
  return report;
}

void CriticalPointSearchConfig::validate() const {
  if (seeds.empty()) throw InvalidParameter("critical point search needs seeds");
  if (newton_max_iters < 1) throw InvalidParameter("newton_max_iters must be >= 1");
  if (!(newton_tol > 0.0) || !(dedup_radius > 0.0)) {
    throw InvalidParameter("search tolerances must be > 0");
  }
  if (!(dedup_radius > newton_tol)) {
    throw InvalidParameter("dedup_radius must exceed newton_tol");
  }
}

std::vector<StrategyProfile> GridSeeds(const Game& game, double lo, double hi,
                                       int per_axis) {
  if (per_axis < 1) throw InvalidParameter("grid needs at least one point per axis");
  const int m = game.dimension();
  std::vector<StrategyProfile> seeds;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  const double step = per_axis > 1 ? (hi - lo) / (per_axis - 1) : 0.0;
  while (true) {
    Vector v(m);
    for (int k = 0; k < m; ++k) v[k] = lo + step * idx[k];
    seeds.push_back(game.profile(v));
    int k = 0;
    while (k < m && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == m) break;
  }
  return seeds;
}

namespace {

// One seed's damped Newton run. Returns true when ||omega|| <= tol.
bool NewtonSolve(const Game& game, Vector& x, const CriticalPointSearchConfig& cfg) {
  Vector w = game.omega(game.profile(x));
  double norm = w.norm();
  for (int it = 0; it < cfg.newton_max_iters && norm > cfg.newton_tol; ++it) {
    const Matrix J = game.jacobian(game.profile(x));
    Eigen::FullPivLU<Matrix> lu(J);
    Vector step;
    bool newton = false;
    if (lu.isInvertible() && lu.rcond() > 1e-12) {
      step = lu.solve(w);
      newton = step.allFinite();
    }
    if (!newton) step = J.transpose() * w;  // descent direction for ||omega||^2
    if (step.squaredNorm() == 0.0) return false;

    bool accepted = false;
    double alpha = 1.0;
    for (int halving = 0; halving <= 30; ++halving, alpha *= 0.5) {
      const Vector trial = x - alpha * step;
      const Vector tw = game.omega(game.profile(trial));
      if (tw.allFinite() && tw.norm() < norm) {
        x = trial;
        w = tw;
        norm = tw.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return norm <= cfg.newton_tol;
}

}  // namespace

std::vector<StrategyProfile> FindCriticalPoints(
    const Game& game, const CriticalPointSearchConfig& config) {
  config.validate();
  std::vector<Vector> found;
  for (const auto& seed : config.seeds) {
    if (!(seed.dims() == game.dims())) {
      throw DimensionError("seed does not conform to game dims");
    }
    Vector x = seed.values();
    if (!NewtonSolve(game, x, config)) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Vector& p) {
      return (p - x).norm() <= config.dedup_radius;
    });
    if (!duplicate) found.push_back(x);
  }
  std::sort(found.begin(), found.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  std::vector<StrategyProfile> out;
  for (auto& v : found) {
    v = v.unaryExpr([](double c) { return c == 0.0 ? 0.0 : c; });  // no -0
    out.push_back(game.profile(v));
  }
  return out;
}

bool IsPotentialGame(const Game& game,
                     const std::vector<StrategyProfile>& sample_points,
                     double tol) {
  if (sample_points.empty()) throw InvalidParameter("potential test needs sample points");
  for (const auto& x : sample_points) {
    const Matrix J = game.jacobian(x);
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

bool ZeroSumDneImpliesLaseCheck(double a, double b, double c) {
  if (!(a > 0.0) || !(-c > 0.0)) {
    throw InvalidParameter(
        "origin of the zero-sum quadratic is a differential Nash point only "
        "for a > 0 and c < 0");
  }
  const Game game = MakeQuadraticZeroSum(a, b, c);
  return Classify(game, StrategyProfile{0.0, 0.0}).flags.is_lase;
}

}  // namespace gradplay
