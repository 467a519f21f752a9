#include "gradplay/census.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gradplay/errors.hpp"
#include "gradplay/parallel.hpp"
#include "gradplay/random.hpp"

namespace gradplay::lq {

LqGame MakeCensusGame(const Mat2& A, double q, double r, const Mat2& Z0) {
  LqGame game;
  game.A = A;
  game.B1 << 1.0, 1.0;
  game.B2 << 0.0, 1.0;
  game.Q1 << 0.01, 0.0, 0.0, 1.0;
  game.R1 = 0.01;
  game.Q2 << 1.0, 0.0, 0.0, q;
  game.R2 = r;
  game.Z0 = Z0;
  return game;
}

const char* OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kStrictSaddle: return "strict_saddle";
    case Outcome::kLase: return "lase";
    case Outcome::kDegenerate: return "degenerate";
    case Outcome::kFailed: return "failed";
  }
  return "unknown";
}

SpectrumClass ClassifySpectrum(const Mat4& jacobian, double tol) {
  Eigen::EigenSolver<Mat4> es(jacobian, false);
  const Eigen::Vector4d re = es.eigenvalues().real();
  SpectrumClass out;
  out.min_real = re.minCoeff();
  out.max_real = re.maxCoeff();
  const double t = tol * (1.0 + jacobian.cwiseAbs().maxCoeff());
  const bool on_axis = (re.array().abs() <= t).any();
  if (on_axis) {
    out.outcome = Outcome::kDegenerate;
  } else if (out.min_real < -t && out.max_real > t) {
    out.outcome = Outcome::kStrictSaddle;
  } else if (out.min_real > t) {
    out.outcome = Outcome::kLase;
  } else {
    // All eigenvalues in the left half-plane cannot happen at a Nash point
    // with positive definite own-blocks; report rather than guess.
    out.outcome = Outcome::kDegenerate;
  }
  return out;
}

void CensusConfig::validate() const {
  if (!(q > 0.0) || !(r > 0.0)) throw InvalidParameter("census needs q, r > 0");
  if (samples < 1) throw InvalidParameter("census needs samples >= 1");
  if (!(h > 0.0)) throw InvalidParameter("census needs h > 0");
  if (!(saddle_tol > 0.0)) throw InvalidParameter("census needs saddle_tol > 0");
}

double CensusResult::frequency() const {
  const int classified = samples - failed;
  return classified > 0 ? static_cast<double>(strict_saddle) / classified : 0.0;
}

bool CensusResult::operator==(const CensusResult& other) const {
  return q == other.q && r == other.r && samples == other.samples &&
         seed == other.seed && strict_saddle == other.strict_saddle &&
         lase == other.lase && degenerate == other.degenerate &&
         failed == other.failed;
}

CensusRecord CensusSample(const CensusConfig& config, int index) {
  Engine engine = MakeEngine(config.seed, static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CensusRecord record;
  record.index = index;
  // Row-major fill keeps the draw order explicit.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) record.A(i, j) = unit(engine);

  const LqGame game = MakeCensusGame(record.A, config.q, config.r, config.Z0);
  try {
    const LqNashSolution nash = LyapunovIterations(game, config.nash);
    record.method = nash.method;
    const Mat4 J = GameJacobian(game, nash.policy, config.h);
    const SpectrumClass spectrum = ClassifySpectrum(J, config.saddle_tol);
    record.outcome = spectrum.outcome;
    record.min_real = spectrum.min_real;
    record.max_real = spectrum.max_real;
  } catch (const Error& e) {
    record.outcome = Outcome::kFailed;
    record.failure = e.what();
  }
  return record;
}

CensusResult SampleCensus(const CensusConfig& config) {
  config.validate();
  std::vector<CensusRecord> records(static_cast<std::size_t>(config.samples));
  ParallelFor(records.size(), [&](std::size_t k) {
    records[k] = CensusSample(config, static_cast<int>(k));
  });

  CensusResult result;
  result.q = config.q;
  result.r = config.r;
  result.samples = config.samples;
  result.seed = config.seed;
  for (const auto& rec : records) {
    switch (rec.outcome) {
      case Outcome::kStrictSaddle: ++result.strict_saddle; break;
      case Outcome::kLase: ++result.lase; break;
      case Outcome::kDegenerate: ++result.degenerate; break;
      case Outcome::kFailed: ++result.failed; break;
    }
  }
  if (config.keep_records) result.records = std::move(records);
  return result;
}

void SweepConfig::validate() const {
  if (grid.empty()) throw InvalidParameter("sweep grid is empty");
  for (double v : grid) {
    if (!(v > 0.0 && v < 1.0)) {
      throw InvalidParameter("sweep grid values must lie in (0, 1)");
    }
  }
  if (!(fixed_other > 0.0)) throw InvalidParameter("sweep fixed value must be > 0");
  if (samples < 1) throw InvalidParameter("sweep needs samples >= 1");
  if (repeats < 1) throw InvalidParameter("sweep needs repeats >= 1");
}

std::vector<SweepPoint> CensusSweep(const SweepConfig& config) {
  config.validate();
  std::vector<SweepPoint> points;
  points.reserve(config.grid.size());
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    SweepPoint point;
    point.grid_value = config.grid[g];
    std::vector<double> freqs;
    for (int k = 0; k < config.repeats; ++k) {
      CensusConfig census = config.base;
      census.samples = config.samples;
      census.q = config.vary == SweepAxis::kQ ? point.grid_value : config.fixed_other;
      census.r = config.vary == SweepAxis::kR ? point.grid_value : config.fixed_other;
      census.seed = DeriveSeed(
          config.seed, g * static_cast<std::uint64_t>(config.repeats) + k);
      CensusResult run = SampleCensus(census);
      freqs.push_back(run.frequency());
      point.failures += run.failed;
      point.runs.push_back(std::move(run));
    }
    const double n = static_cast<double>(freqs.size());
    point.mean_frequency = std::accumulate(freqs.begin(), freqs.end(), 0.0) / n;
    double var = 0.0;
    for (double f : freqs) var += (f - point.mean_frequency) * (f - point.mean_frequency);
    var = freqs.size() > 1 ? var / (n - 1.0) : 0.0;
    const double half = 1.96 * std::sqrt(var / n);
    point.ci_low = point.mean_frequency - half;
    point.ci_high = point.mean_frequency + half;
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> out;
  auto parse_number = [&](const std::string& token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) {
      throw InvalidParameter("bad grid token '" + token + "'");
    }
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) {
      throw InvalidParameter("grid range must be lo:hi:count, got '" + text + "'");
    }
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (count < 1 || count != std::floor(count) || !(hi > lo)) {
      throw InvalidParameter("bad grid range '" + text + "'");
    }
    // Half-open: lo, lo + d, ..., hi - d with d = (hi - lo) / count.
    const int n = static_cast<int>(count);
    for (int k = 0; k < n; ++k) out.push_back(lo + k * (hi - lo) / n);
    return out;
  }
  std::stringstream ss(text);
  for (std::string token; std::getline(ss, token, ',');) {
    out.push_back(parse_number(token));
  }
  if (out.empty()) throw InvalidParameter("empty grid");
  return out;
}

}  // namespace gradplay::lq
