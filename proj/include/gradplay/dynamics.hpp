#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradplay/game.hpp"
#include "gradplay/random.hpp"

namespace gradplay {

/// Per-player constant learning rates gamma_1..gamma_n. When a Lipschitz
/// bound L on D omega is supplied, every rate must satisfy gamma_i < 1/L.
class LearningRates {
 public:
  explicit LearningRates(Vector per_player,
                         std::optional<double> lipschitz_bound = std::nullopt);
  static LearningRates Uniform(int players, double gamma);

  const Vector& per_player() const { return rates_; }
  std::optional<double> lipschitz_bound() const { return lipschitz_; }

  /// gamma expanded onto the joint coordinates (gamma_i on player i's block).
  Vector expand(const PlayerDims& dims) const;

 private:
  Vector rates_;
  std::optional<double> lipschitz_;
};

/// Step size gamma_t for t = 1, 2, ...
struct StepSchedule {
  enum class Kind { kConstant, kPower };

  Kind kind = Kind::kPower;
  double c1 = 1.0;
  double c2 = 1.0;  // upper envelope c2 / t^eta; informational
  double eta = 0.75;

  static StepSchedule Constant(double gamma);
  static StepSchedule Power(double c1, double eta);

  /// Throws InvalidParameter unless constant > 0, or eta in (1/2, 1] with
  /// 0 < c1 <= c2.
  void validate() const;
  double at(std::int64_t t) const;
};

struct NoiseModel {
  enum class Kind { kIsotropicGaussian, kUniformSphere, kOnePointBandit };

  Kind kind = Kind::kIsotropicGaussian;
  /// Gaussian standard deviation, sphere radius, or bandit smoothing radius.
  double scale = 0.0;

  static NoiseModel Gaussian(double sigma);
  static NoiseModel Sphere(double radius);
  static NoiseModel OnePointBandit(double delta);

  void validate() const;

  /// Lower bound on E[(w_i . v)^+] for unit v in a block of dimension `dim`:
  /// sigma / sqrt(2 pi) for the Gaussian, r E|u_1| / 2 on the sphere.
  /// The bandit estimator has no cost-independent bound and reports 0.
  double excitation_bound(int dim) const;

  /// Joint noise vector, drawn as independent per-player blocks.
  Vector sample(const PlayerDims& dims, Engine& engine) const;
};

enum class Termination { kConverged, kEscapedBall, kMaxIters, kDiverged };

const char* TerminationName(Termination t);

struct Trajectory {
  PlayerDims dims;
  std::vector<std::int64_t> steps;  // strictly increasing
  std::vector<Vector> points;
  Termination status = Termination::kMaxIters;
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;

  const Vector& final_point() const { return points.back(); }
  bool operator==(const Trajectory& other) const;
};

struct SimulationOptions {
  std::int64_t max_iters = 10000;
  /// Stop as converged when ||omega(x_t)|| <= conv_tol.
  double conv_tol = 1e-10;
  /// Stop as diverged when ||x_t|| > blowup or any coordinate is not finite.
  double blowup = 1e6;
  /// Store every record_stride-th iterate (the first and last always).
  std::int64_t record_stride = 1;
  /// Stop as escaped once ||x_t - center|| > radius.
  std::optional<std::pair<Vector, double>> escape_ball;

  void validate() const;
};

/// x - gamma (.) omega(x), with gamma_i applied to player i's block.
StrategyProfile StepDeterministic(const Game& game, const StrategyProfile& x,
                                  const LearningRates& rates);

Trajectory SimulateDeterministic(const Game& game, const StrategyProfile& x0,
                                 const LearningRates& rates,
                                 const SimulationOptions& options = {});

/// x_{t+1} = x_t - gamma_t (omega(x_t) + w_{t+1}), all players sharing
/// gamma_t. The bandit model replaces omega + w by the one-point estimate.
/// Identical arguments give bit-identical trajectories.
Trajectory SimulateStochastic(const Game& game, const StrategyProfile& x0,
                              const StepSchedule& schedule,
                              const NoiseModel& noise,
                              const SimulationOptions& options,
                              std::uint64_t seed);

/// Uniform direction on the unit sphere of R^dim.
Vector UnitSphereSample(int dim, Engine& engine);

/// Uniform point in the ball of radius `radius` around `center`.
Vector BallSample(const Vector& center, double radius, Engine& engine);

/// (m_i / delta) f_i(x_i + delta u, x_-i) u with u uniform on player i's unit
/// sphere: an unbiased gradient estimate of the delta-smoothed cost.
Vector OnePointGradientEstimate(const Game& game, int player,
                                const StrategyProfile& x, double delta,
                                Engine& engine);
Vector OnePointGradientEstimate(const Game& game, int player,
                                const StrategyProfile& x, double delta,
                                std::uint64_t seed);

struct AvoidanceConfig {
  StrategyProfile saddle;
  double radius = 0.1;
  std::variant<LearningRates, StepSchedule> step = StepSchedule::Constant(0.1);
  std::optional<NoiseModel> noise;  // stochastic runs only
  int trials = 1000;
  std::uint64_t seed = 0;
  double escape_factor = 10.0;
  std::int64_t max_iters = 10000;
  double blowup = 1e6;
  bool stop_on_escape = true;
  double classify_tol = 1e-9;
};

struct AvoidanceTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  Termination status = Termination::kMaxIters;
  std::int64_t iterations = 0;
  double final_distance = 0.0;
  bool escaped = false;
};

struct AvoidanceResult {
  double avoidance_rate = 0.0;
  int trials = 0;
  int escaped = 0;
  double escape_iter_mean = 0.0;
  double escape_iter_median = 0.0;
  std::int64_t escape_iter_max = 0;
  std::vector<AvoidanceTrial> per_trial;
};

/// Fraction of trials, each started uniformly in the ball of `radius` around
/// the saddle, whose final iterate lies outside the ball of
/// escape_factor * radius. Trial k uses seed + k. Throws InvalidParameter
/// unless the saddle classifies as a strict saddle.
AvoidanceResult SaddleAvoidanceExperiment(const Game& game,
                                          const AvoidanceConfig& config);

}  // namespace gradplay
