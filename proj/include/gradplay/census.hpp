#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradplay/lq_game.hpp"

namespace gradplay::lq {

/// Fixed parameters of the sampled game family: B1 = (1,1)', B2 = (0,1)',
/// Q1 = diag(0.01, 1), R1 = 0.01, Q2 = diag(1, q), R2 = r.
LqGame MakeCensusGame(const Mat2& A, double q, double r,
                      const Mat2& Z0 = Mat2::Identity());

enum class Outcome { kStrictSaddle, kLase, kDegenerate, kFailed };

const char* OutcomeName(Outcome outcome);

struct SpectrumClass {
  Outcome outcome = Outcome::kDegenerate;
  double min_real = 0.0;
  double max_real = 0.0;
};

/// Strict saddle: some Re(lambda) < -t and some > t, with
/// t = tol * (1 + max|J_ij|). LASE: all Re(lambda) > t. Anything else is
/// degenerate.
SpectrumClass ClassifySpectrum(const Mat4& jacobian, double tol);

struct CensusConfig {
  double q = 0.01;
  double r = 0.1;
  int samples = 1000;
  std::uint64_t seed = 0;
  double h = 1e-5;
  double saddle_tol = 1e-6;
  Mat2 Z0 = Mat2::Identity();
  NashOptions nash;
  bool keep_records = false;

  void validate() const;
};

struct CensusRecord {
  int index = 0;
  Mat2 A = Mat2::Zero();
  Outcome outcome = Outcome::kFailed;
  double min_real = 0.0;
  double max_real = 0.0;
  std::optional<NashMethod> method;
  std::string failure;  // empty unless outcome == kFailed
};

struct CensusResult {
  double q = 0.0;
  double r = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  int strict_saddle = 0;
  int lase = 0;
  int degenerate = 0;
  int failed = 0;
  std::vector<CensusRecord> records;

  int degenerate_or_failed() const { return degenerate + failed; }
  /// strict_saddle / (samples - failed); failed solves are excluded.
  double frequency() const;

  bool operator==(const CensusResult& other) const;
};

/// Draws `samples` A matrices with i.i.d. U(0,1) entries, solves each game
/// for its Nash gains, and classifies the game Jacobian there. Sample k uses
/// the random stream (seed, k), so results do not depend on worker count.
CensusResult SampleCensus(const CensusConfig& config);

/// One sampled game of a census (exposed for inspection and tests).
CensusRecord CensusSample(const CensusConfig& config, int index);

enum class SweepAxis { kQ, kR };

struct SweepConfig {
  SweepAxis vary = SweepAxis::kR;
  std::vector<double> grid;
  double fixed_other = 0.01;
  int samples = 1000;
  int repeats = 10;
  std::uint64_t seed = 0;
  CensusConfig base;  // h, tolerances, Z0, nash options

  void validate() const;
};

struct SweepPoint {
  double grid_value = 0.0;
  std::vector<CensusResult> runs;
  double mean_frequency = 0.0;
  double ci_low = 0.0;   // mean -/+ 1.96 sd / sqrt(repeats)
  double ci_high = 0.0;
  int failures = 0;      // summed over repeats
};

/// Repeats independent censuses per grid value. Repeat k of grid point g uses
/// census seed DeriveSeed(seed, g * repeats + k).
std::vector<SweepPoint> CensusSweep(const SweepConfig& config);

/// "lo:hi:n" gives n points lo + k (hi - lo) / n, k = 0..n-1 (hi excluded);
/// otherwise a comma-separated list.
std::vector<double> ParseGrid(const std::string& text);

}  // namespace gradplay::lq
