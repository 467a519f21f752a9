#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace gradplay {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Per-player block sizes m_1..m_n of the joint strategy space.
class PlayerDims {
 public:
  PlayerDims() = default;
  explicit PlayerDims(std::vector<int> dims);

  /// n players, each with a scalar strategy.
  static PlayerDims Scalar(int players);

  int players() const { return static_cast<int>(dims_.size()); }
  int total() const { return total_; }
  int size(int player) const { return dims_.at(player); }
  int offset(int player) const { return offsets_.at(player); }
  const std::vector<int>& sizes() const { return dims_; }

  bool operator==(const PlayerDims& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

/// Joint strategy x = (x_1, ..., x_n) with per-player slicing.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(Vector values, PlayerDims dims);
  StrategyProfile(std::initializer_list<double> values);  // scalar players

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  const PlayerDims& dims() const { return dims_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[k]; }

  /// Coordinates owned by player i (0-based).
  Eigen::VectorBlock<const Vector> slice(int player) const;

  /// Replaces player i's block, keeping the others (x_i, x_{-i}).
  StrategyProfile with_block(int player, const Vector& block) const;

 private:
  Vector values_;
  PlayerDims dims_;
};

}  // namespace gradplay
