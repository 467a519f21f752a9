#include "gradplay/profile.hpp"

#include <numeric>
#include <string>

#include "gradplay/errors.hpp"

namespace gradplay {

PlayerDims::PlayerDims(std::vector<int> dims) : dims_(std::move(dims)) {
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d < 1) throw InvalidParameter("player dimension must be >= 1");
    offsets_.push_back(total_);
    total_ += d;
  }
}

PlayerDims PlayerDims::Scalar(int players) {
  return PlayerDims(std::vector<int>(static_cast<std::size_t>(players), 1));
}

StrategyProfile::StrategyProfile(Vector values, PlayerDims dims)
    : values_(std::move(values)), dims_(std::move(dims)) {
  if (values_.size() != dims_.total()) {
    throw DimensionError("profile has " + std::to_string(values_.size()) +
                         " coordinates but dims sum to " +
                         std::to_string(dims_.total()));
  }
}

StrategyProfile::StrategyProfile(std::initializer_list<double> values)
    : values_(static_cast<Eigen::Index>(values.size())),
      dims_(PlayerDims::Scalar(static_cast<int>(values.size()))) {
  int k = 0;
  for (double v : values) values_[k++] = v;
}

Eigen::VectorBlock<const Vector> StrategyProfile::slice(int player) const {
  return values_.segment(dims_.offset(player), dims_.size(player));
}

StrategyProfile StrategyProfile::with_block(int player,
                                            const Vector& block) const {
  if (block.size() != dims_.size(player)) {
    throw DimensionError("block size does not match player dimension");
  }
  StrategyProfile out = *this;
  out.values_.segment(dims_.offset(player), dims_.size(player)) = block;
  return out;
}

}  // namespace gradplay
