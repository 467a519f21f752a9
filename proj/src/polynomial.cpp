#include "gradplay/polynomial.hpp"

#include "gradplay/errors.hpp"

namespace gradplay {

namespace {

double IntPow(double base, int exp) {
  double out = 1.0;
  for (; exp > 0; --exp) out *= base;
  return out;
}

}  // namespace

PolynomialCost::PolynomialCost(int num_vars, std::vector<Monomial> terms)
    : num_vars_(num_vars), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (static_cast<int>(t.exponents.size()) != num_vars_) {
      throw DimensionError("monomial exponent vector has wrong length");
    }
    for (int e : t.exponents) {
      if (e < 0) throw InvalidParameter("negative exponent in monomial");
    }
  }
}

double PolynomialCost::operator()(const Vector& x) const {
  if (x.size() != num_vars_) {
    throw DimensionError("polynomial evaluated at point of wrong dimension");
  }
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (int k = 0; k < num_vars_; ++k) v *= IntPow(x[k], t.exponents[k]);
    sum += v;
  }
  return sum;
}

PolynomialCost PolynomialCost::derivative(int var) const {
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    const int e = t.exponents.at(var);
    if (e == 0 || t.coef == 0.0) continue;
    Monomial d = t;
    d.coef *= e;
    d.exponents[var] = e - 1;
    out.push_back(std::move(d));
  }
  return PolynomialCost(num_vars_, std::move(out));
}

double PolynomialCost::constant_term() const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    bool constant = true;
    for (int e : t.exponents) constant = constant && e == 0;
    if (constant) sum += t.coef;
  }
  return sum;
}

}  // namespace gradplay
