#include "gradplay/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "gradplay/equilibria.hpp"
#include "gradplay/errors.hpp"
#include "gradplay/parallel.hpp"

namespace gradplay {

LearningRates::LearningRates(Vector per_player,
                             std::optional<double> lipschitz_bound)
    : rates_(std::move(per_player)), lipschitz_(lipschitz_bound) {
  if (rates_.size() == 0) throw InvalidParameter("learning rates are empty");
  for (double g : rates_) {
    if (!(g > 0.0)) throw InvalidParameter("learning rates must be > 0");
  }
  if (lipschitz_) {
    if (!(*lipschitz_ > 0.0)) throw InvalidParameter("Lipschitz bound must be > 0");
    if (!(rates_.maxCoeff() < 1.0 / *lipschitz_)) {
      throw InvalidParameter("learning rates must satisfy gamma_i < 1/L");
    }
  }
}

LearningRates LearningRates::Uniform(int players, double gamma) {
  return LearningRates(Vector::Constant(players, gamma));
}

Vector LearningRates::expand(const PlayerDims& dims) const {
  if (rates_.size() != dims.players()) {
    throw DimensionError("need one learning rate per player");
  }
  Vector out(dims.total());
  for (int i = 0; i < dims.players(); ++i) {
    out.segment(dims.offset(i), dims.size(i)).setConstant(rates_[i]);
  }
  return out;
}

StepSchedule StepSchedule::Constant(double gamma) {
  return {Kind::kConstant, gamma, gamma, 0.0};
}

StepSchedule StepSchedule::Power(double c1, double eta) {
  return {Kind::kPower, c1, c1, eta};
}

void StepSchedule::validate() const {
  if (kind == Kind::kConstant) {
    if (!(c1 > 0.0)) throw InvalidParameter("constant step must be > 0");
    return;
  }
  if (!(eta > 0.5 && eta <= 1.0)) {
    throw InvalidParameter("power schedule needs eta in (1/2, 1]");
  }
  if (!(c1 > 0.0 && c1 <= c2)) {
    throw InvalidParameter("power schedule needs 0 < c1 <= c2");
  }
}

double StepSchedule::at(std::int64_t t) const {
  if (kind == Kind::kConstant) return c1;
  return c1 / std::pow(static_cast<double>(t), eta);
}

NoiseModel NoiseModel::Gaussian(double sigma) {
  return {Kind::kIsotropicGaussian, sigma};
}
NoiseModel NoiseModel::Sphere(double radius) { return {Kind::kUniformSphere, radius}; }
NoiseModel NoiseModel::OnePointBandit(double delta) {
  return {Kind::kOnePointBandit, delta};
}

void NoiseModel::validate() const {
  if (kind == Kind::kOnePointBandit) {
    if (!(scale > 0.0)) throw InvalidParameter("bandit smoothing radius must be > 0");
  } else if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidParameter("noise scale must be finite and >= 0");
  }
}

double NoiseModel::excitation_bound(int dim) const {
  switch (kind) {
    case Kind::kIsotropicGaussian:
      return scale / std::sqrt(2.0 * std::numbers::pi);
    case Kind::kUniformSphere: {
      // E|u_1| for u uniform on the unit sphere of R^dim.
      const double d = dim;
      const double mean_abs = std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d + 1.0))) /
                              std::sqrt(std::numbers::pi);
      return 0.5 * scale * mean_abs;
    }
    case Kind::kOnePointBandit:
      return 0.0;
  }
  return 0.0;
}

Vector UnitSphereSample(int dim, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(dim);
  double n = 0.0;
  do {
    for (int k = 0; k < dim; ++k) u[k] = normal(engine);
    n = u.norm();
  } while (n == 0.0);
  return u / n;
}

Vector BallSample(const Vector& center, double radius, Engine& engine) {
  const int dim = static_cast<int>(center.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector dir = UnitSphereSample(dim, engine);
  const double rho = radius * std::pow(unit(engine), 1.0 / dim);
  return center + rho * dir;
}

Vector NoiseModel::sample(const PlayerDims& dims, Engine& engine) const {
  Vector w(dims.total());
  switch (kind) {
    case Kind::kIsotropicGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int k = 0; k < dims.total(); ++k) w[k] = scale * normal(engine);
      break;
    }
    case Kind::kUniformSphere:
      for (int i = 0; i < dims.players(); ++i) {
        w.segment(dims.offset(i), dims.size(i)) =
            scale * UnitSphereSample(dims.size(i), engine);
      }
      break;
    case Kind::kOnePointBandit:
      throw InvalidParameter("bandit noise is not an additive perturbation");
  }
  return w;
}

const char* TerminationName(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kEscapedBall: return "escaped_ball";
    case Termination::kMaxIters: return "max_iters";
    case Termination::kDiverged: return "diverged";
  }
  return "unknown";
}

bool Trajectory::operator==(const Trajectory& other) const {
  if (!(dims == other.dims) || steps != other.steps || status != other.status ||
      iterations != other.iterations || seed != other.seed ||
      points.size() != other.points.size()) {
    return false;
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    // Bitwise comparison: NaN payloads and signed zeros must match too.
    if (points[k].size() != other.points[k].size() ||
        std::memcmp(points[k].data(), other.points[k].data(),
                    sizeof(double) * points[k].size()) != 0) {
      return false;
    }
  }
  return true;
}

void SimulationOptions::validate() const {
  if (max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
  if (!(conv_tol >= 0.0)) throw InvalidParameter("conv_tol must be >= 0");
  if (!(blowup > 0.0)) throw InvalidParameter("blowup must be > 0");
  if (record_stride < 1) throw InvalidParameter("record_stride must be >= 1");
  if (escape_ball && !(escape_ball->second > 0.0)) {
    throw InvalidParameter("escape radius must be > 0");
  }
}

StrategyProfile StepDeterministic(const Game& game, const StrategyProfile& x,
                                  const LearningRates& rates) {
  const Vector gamma = rates.expand(game.dims());
  return game.profile(x.values() - gamma.cwiseProduct(game.omega(x)));
}

namespace {

// Shared driver: `update(t, x)` returns x_{t+1} given x_t. Noisy runs skip
// the convergence test at x0, since a critical start point is not where the
// noise leaves them.
template <typename Update>
Trajectory Run(const Game& game, const StrategyProfile& x0,
               const SimulationOptions& options, std::uint64_t seed,
               bool converge_at_start, Update&& update) {
  options.validate();
  if (!(x0.dims() == game.dims())) {
    throw DimensionError("initial profile does not conform to game dims");
  }
  Trajectory traj;
  traj.dims = game.dims();
  traj.seed = seed;
  traj.steps.push_back(0);
  traj.points.push_back(x0.values());

  auto terminal = [&](const Vector& x, bool check_conv) -> std::optional<Termination> {
    if (!x.allFinite() || x.norm() > options.blowup) return Termination::kDiverged;
    if (options.escape_ball &&
        (x - options.escape_ball->first).norm() > options.escape_ball->second) {
      return Termination::kEscapedBall;
    }
    if (check_conv && game.omega(game.profile(x)).norm() <= options.conv_tol) {
      return Termination::kConverged;
    }
    return std::nullopt;
  };

  Vector x = x0.values();
  std::int64_t t = 0;
  auto status = terminal(x, converge_at_start);
  while (!status && t < options.max_iters) {
    x = update(t + 1, x);
    ++t;
    status = terminal(x, true);
    if (status || t % options.record_stride == 0 || t == options.max_iters) {
      traj.steps.push_back(t);
      traj.points.push_back(x);
    }
  }
  traj.status = status.value_or(Termination::kMaxIters);
  traj.iterations = t;
  return traj;
}

}  // namespace

Trajectory SimulateDeterministic(const Game& game, const StrategyProfile& x0,
                                 const LearningRates& rates,
                                 const SimulationOptions& options) {
  const Vector gamma = rates.expand(game.dims());
  return Run(game, x0, options, 0, true, [&](std::int64_t, const Vector& x) -> Vector {
    return x - gamma.cwiseProduct(game.omega(game.profile(x)));
  });
}

Trajectory SimulateStochastic(const Game& game, const StrategyProfile& x0,
                              const StepSchedule& schedule,
                              const NoiseModel& noise,
                              const SimulationOptions& options,
                              std::uint64_t seed) {
  schedule.validate();
  noise.validate();
  Engine engine = MakeEngine(seed);
  const auto& dims = game.dims();
  if (noise.kind == NoiseModel::Kind::kOnePointBandit) {
    return Run(game, x0, options, seed, false, [&](std::int64_t t, const Vector& x) -> Vector {
      const StrategyProfile profile = game.profile(x);
      Vector g(dims.total());
      for (int i = 0; i < game.players(); ++i) {
        g.segment(dims.offset(i), dims.size(i)) =
            OnePointGradientEstimate(game, i, profile, noise.scale, engine);
      }
      return x - schedule.at(t) * g;
    });
  }
  return Run(game, x0, options, seed, false, [&](std::int64_t t, const Vector& x) -> Vector {
    const Vector w = noise.sample(dims, engine);
    return x - schedule.at(t) * (game.omega(game.profile(x)) + w);
  });
}

Vector OnePointGradientEstimate(const Game& game, int player,
                                const StrategyProfile& x, double delta,
                                Engine& engine) {
  if (!(delta > 0.0)) throw InvalidParameter("smoothing radius must be > 0");
  if (player < 0 || player >= game.players()) {
    throw InvalidParameter("player index out of range");
  }
  const int dim = game.dims().size(player);
  const Vector u = UnitSphereSample(dim, engine);
  const StrategyProfile probe =
      x.with_block(player, Vector(x.slice(player)) + delta * u);
  return (dim / delta) * game.cost(player, probe) * u;
}

Vector OnePointGradientEstimate(const Game& game, int player,
                                const StrategyProfile& x, double delta,
                                std::uint64_t seed) {
  Engine engine = MakeEngine(seed);
  return OnePointGradientEstimate(game, player, x, delta, engine);
}

AvoidanceResult SaddleAvoidanceExperiment(const Game& game,
                                          const AvoidanceConfig& config) {
  if (!(config.radius > 0.0)) throw InvalidParameter("radius must be > 0");
  if (config.trials < 1) throw InvalidParameter("trials must be >= 1");
  if (!(config.escape_factor > 1.0)) throw InvalidParameter("escape_factor must be > 1");
  if (!Classify(game, config.saddle, config.classify_tol).flags.is_strict_saddle) {
    throw InvalidParameter("avoidance experiment needs a strict saddle point");
  }
  if (const auto* schedule = std::get_if<StepSchedule>(&config.step)) {
    schedule->validate();
  }
  if (config.noise) config.noise->validate();

  const Vector center = config.saddle.values();
  const double escape_radius = config.escape_factor * config.radius;
  SimulationOptions options;
  options.max_iters = config.max_iters;
  options.blowup = config.blowup;
  options.conv_tol = 0.0;
  options.record_stride = config.max_iters;
  if (config.stop_on_escape) options.escape_ball.emplace(center, escape_radius);

  std::vector<AvoidanceTrial> trials(static_cast<std::size_t>(config.trials));
  ParallelFor(trials.size(), [&](std::size_t k) {
    AvoidanceTrial& out = trials[k];
    out.trial = static_cast<int>(k);
    out.seed = config.seed + k;
    Engine engine = MakeEngine(out.seed, 1);
    const StrategyProfile x0 = game.profile(BallSample(center, config.radius, engine));

    Trajectory traj;
    if (config.noise) {
      const StepSchedule schedule =
          std::holds_alternative<StepSchedule>(config.step)
              ? std::get<StepSchedule>(config.step)
              : StepSchedule::Constant(std::get<LearningRates>(config.step).per_player()[0]);
      traj = SimulateStochastic(game, x0, schedule, *config.noise, options, out.seed);
    } else if (const auto* rates = std::get_if<LearningRates>(&config.step)) {
      traj = SimulateDeterministic(game, x0, *rates, options);
    } else {
      const StepSchedule& schedule = std::get<StepSchedule>(config.step);
      traj = SimulateStochastic(game, x0, schedule, NoiseModel::Gaussian(0.0),
                                options, out.seed);
    }
    out.status = traj.status;
    out.iterations = traj.iterations;
    const Vector& last = traj.final_point();
    out.final_distance = last.allFinite() ? (last - center).norm()
                                          : std::numeric_limits<double>::infinity();
    out.escaped = out.final_distance > escape_radius;
  });

  AvoidanceResult result;
  result.trials = config.trials;
  std::vector<std::int64_t> escape_iters;
  for (const auto& t : trials) {
    if (!t.escaped) continue;
    ++result.escaped;
    escape_iters.push_back(t.iterations);
  }
  result.avoidance_rate = static_cast<double>(result.escaped) / config.trials;
  if (!escape_iters.empty()) {
    std::sort(escape_iters.begin(), escape_iters.end());
    double sum = 0.0;
    for (auto v : escape_iters) sum += static_cast<double>(v);
    result.escape_iter_mean = sum / escape_iters.size();
    const std::size_t n = escape_iters.size();
    result.escape_iter_median =
        n % 2 ? escape_iters[n / 2]
              : 0.5 * static_cast<double>(escape_iters[n / 2 - 1] + escape_iters[n / 2]);
    result.escape_iter_max = escape_iters.back();
  }
  result.per_trial = std::move(trials);
  return result;
}

}  // namespace gradplay
