#include "check_suite.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "gradplay/census.hpp"
#include "gradplay/dynamics.hpp"
#include "gradplay/equilibria.hpp"
#include "gradplay/families.hpp"
#include "gradplay/io.hpp"
#include "gradplay/random.hpp"

namespace gradplay::cli {

namespace {

using Check = std::function<CheckResult()>;

CheckResult Guard(const std::string& name, const Check& body) {
  try {
    CheckResult r = body();
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

CheckResult Bool(bool ok, std::string detail = {}) { return {"", ok, std::move(detail)}; }

CheckResult FiniteDifferences(const Game& game) {
  Engine engine = MakeEngine(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vector x(game.dimension());
    for (auto& v : x) v = u(engine);
    const auto rep = FiniteDifferenceCheck(game, game.profile(x), 1e-5);
    if (rep.step_warning) return Bool(false, "step warning");
    worst = std::max({worst, rep.gradient_error, rep.jacobian_error});
  }
  return Bool(worst < 1e-6, "max error " + io::FormatDouble(worst));
}

CheckResult Taxonomy(const Game& game, double tol, bool dne, bool lase, bool saddle) {
  const auto rep = Classify(game, game.profile(Vector::Zero(game.dimension())), tol);
  const auto& f = rep.flags;
  const bool ok = f.is_critical && f.is_dne == dne && f.is_lase == lase &&
                  f.is_strict_saddle == saddle && !f.is_degenerate;
  return Bool(ok, "dne=" + std::to_string(f.is_dne) + " lase=" + std::to_string(f.is_lase) +
                      " strict_saddle=" + std::to_string(f.is_strict_saddle));
}

CheckResult EigenOracle() {
  Engine engine = MakeEngine(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    Matrix m(2, 2);
    m << u(engine), u(engine), u(engine), u(engine);
    const double tr = m.trace();
    const double det = m.determinant();
    const Complex disc = std::sqrt(Complex(tr * tr / 4.0 - det, 0.0));
    const auto eig = SortedEigenvalues(m);
    const Complex a = tr / 2.0 + disc;
    const Complex b = tr / 2.0 - disc;
    const double err = std::min(std::abs(eig[0] - a) + std::abs(eig[1] - b),
                                std::abs(eig[0] - b) + std::abs(eig[1] - a));
    worst = std::max(worst, err);
  }
  return Bool(worst < 1e-10, "max error " + io::FormatDouble(worst));
}

CheckResult RiccatiAtZero() {
  const lq::LqGame game = lq::MakeCensusGame(lq::Mat2::Zero(), 0.01, 0.1);
  const auto sol = lq::LyapunovIterations(game);
  const double res = std::max(sol.residuals[0], sol.residuals[1]);
  const double gain = sol.policy.stacked().cwiseAbs().maxCoeff();
  const double pq = std::max((sol.P1 - game.Q1).cwiseAbs().maxCoeff(),
                             (sol.P2 - game.Q2).cwiseAbs().maxCoeff());
  return Bool(res < 1e-10 && gain < 1e-10 && pq < 1e-10,
              "residual " + io::FormatDouble(res) + " max|K| " + io::FormatDouble(gain));
}

CheckResult Avoidance(const Game& game, const Vector& saddle, double radius, double gamma) {
  AvoidanceConfig c;
  c.saddle = game.profile(saddle);
  c.radius = radius;
  c.step = LearningRates::Uniform(game.players(), gamma);
  c.trials = 1000;
  c.seed = 11;
  const auto r = SaddleAvoidanceExperiment(game, c);
  return Bool(r.avoidance_rate >= 0.999, "rate " + io::FormatDouble(r.avoidance_rate));
}

CheckResult StochasticEscape() {
  const Game game = MakeQuadraticPotential(1, 2, 1);
  const auto origin = game.profile(Vector::Zero(2));
  SimulationOptions opt;
  opt.conv_tol = 0.0;
  int escaped = 0;
  for (int s = 0; s < 200; ++s) {
    const auto t = SimulateStochastic(game, origin, StepSchedule::Power(1.0, 0.75),
                                      NoiseModel::Gaussian(0.1), opt, 1000 + s);
    if (t.final_point().norm() > 0.5) ++escaped;
  }
  return Bool(escaped >= 198, std::to_string(escaped) + "/200 escaped");
}

CheckResult SmallCensus() {
  lq::CensusConfig c;
  c.samples = 200;
  c.seed = 5;
  const auto r = lq::SampleCensus(c);
  const double f = r.frequency();
  return Bool(f >= 0.03 && f <= 0.35 && r.failed < r.samples / 5,
              "frequency " + io::FormatDouble(f) + " failed " + std::to_string(r.failed));
}

}  // namespace

std::vector<CheckResult> RunCheckSuite(double tol, bool deep) {
  std::vector<CheckResult> out;
  for (const auto& name : FamilyNames()) {
    out.push_back(Guard("finite-differences/" + name, [&] {
      FamilyParams p;
      if (name == "morse-smale-chain") p = {{"n", 3}};
      else if (name == "van-der-pol") p = {{"mu", 1}};
      else if (name == "general-sum-quadratic") p = {{"a", 1}, {"b", 1}, {"c", -1}, {"d", -0.5}};
      else p = {{"a", 1}, {"b", 2}, {"c", 1}};
      return FiniteDifferences(MakeFamily(name, p));
    }));
  }
  out.push_back(Guard("eigenvalues/2x2-closed-form", EigenOracle));
  out.push_back(Guard("taxonomy/general-sum-non-nash-attractor", [&] {
    return Taxonomy(MakeQuadraticGeneralSum(1, 1, -1, -0.5), tol, false, true, false);
  }));
  out.push_back(Guard("taxonomy/zero-sum-non-nash-attractor", [&] {
    return Taxonomy(MakeQuadraticZeroSum(2, 2, 1), tol, false, true, false);
  }));
  out.push_back(Guard("taxonomy/potential-nash-strict-saddle", [&] {
    return Taxonomy(MakeQuadraticPotential(1, 2, 1), tol, true, false, true);
  }));
  out.push_back(Guard("taxonomy/zero-sum-dne-lase", [&] {
    return Taxonomy(MakeQuadraticZeroSum(1, 1, -1), tol, true, true, false);
  }));
  out.push_back(Guard("lq/riccati-residual-a0", RiccatiAtZero));
  if (deep) {
    out.push_back(Guard("avoidance/potential-saddle", [] {
      return Avoidance(MakeQuadraticPotential(1, 2, 1), Vector::Zero(2), 0.1, 0.1);
    }));
    out.push_back(Guard("avoidance/chain-saddle", [] {
      Vector s(3);
      s << 1, 0, 0;
      return Avoidance(MakeMorseSmaleChain(3), s, 0.05, 0.05);
    }));
    out.push_back(Guard("avoidance/stochastic-escape", StochasticEscape));
    out.push_back(Guard("lq/census-band", SmallCensus));
  }
  return out;
}

}  // namespace gradplay::cli
