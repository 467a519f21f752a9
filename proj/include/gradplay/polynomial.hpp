#pragma once

#include <vector>

#include "gradplay/profile.hpp"

namespace gradplay {

struct Monomial {
  double coef = 0.0;
  std::vector<int> exponents;  // one per joint coordinate
};

/// Multivariate polynomial over the joint strategy space. Derivatives follow
/// the power rule exactly.
class PolynomialCost {
 public:
  PolynomialCost() = default;
  PolynomialCost(int num_vars, std::vector<Monomial> terms);

  int num_vars() const { return num_vars_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double operator()(const Vector& x) const;

  /// d/dx_var. Terms that vanish are dropped.
  PolynomialCost derivative(int var) const;

  /// Sum of coefficients of constant terms (the value at the origin).
  double constant_term() const;

 private:
  int num_vars_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace gradplay
