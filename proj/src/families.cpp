#include "gradplay/families.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "gradplay/errors.hpp"

namespace gradplay {

namespace {

std::string Num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

Monomial Term(double coef, std::vector<int> exponents) {
  return Monomial{coef, std::move(exponents)};
}

// (a/2) x1^2 + b x1 x2 + (c/2) x2^2, optionally scaled.
PolynomialCost Quadratic(double a, double b, double c, double scale = 1.0) {
  return PolynomialCost(2, {Term(scale * 0.5 * a, {2, 0}),
                            Term(scale * b, {1, 1}),
                            Term(scale * 0.5 * c, {0, 2})});
}

}  // namespace

Game MakeQuadraticGeneralSum(double a, double b, double c, double d) {
  PolynomialCost f1(2, {Term(0.5 * a, {2, 0}), Term(b, {1, 1})});
  PolynomialCost f2(2, {Term(0.5 * d, {0, 2}), Term(c, {1, 1})});
  return Game(PlayerDims::Scalar(2), {f1, f2},
              "general-sum-quadratic:a=" + Num(a) + ",b=" + Num(b) +
                  ",c=" + Num(c) + ",d=" + Num(d));
}

Game MakeQuadraticZeroSum(double a, double b, double c) {
  return Game(PlayerDims::Scalar(2), {Quadratic(a, b, c), Quadratic(a, b, c, -1.0)},
              "zero-sum-quadratic:a=" + Num(a) + ",b=" + Num(b) + ",c=" + Num(c));
}

Game MakeQuadraticPotential(double a, double b, double c) {
  return Game(PlayerDims::Scalar(2), {Quadratic(a, b, c), Quadratic(a, b, c)},
              "potential-quadratic:a=" + Num(a) + ",b=" + Num(b) + ",c=" + Num(c));
}

Game MakeMorseSmaleChain(int n) {
  if (n < 2) throw InvalidParameter("Morse-Smale chain needs n >= 2");
  std::vector<PolynomialCost> costs;
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    e[i + 1] = 1;
    costs.emplace_back(n, std::vector<Monomial>{Term(1.0, e)});
  }
  std::vector<int> cubic(n, 0), linear(n, 0);
  cubic[0] = 2;
  cubic[n - 1] = 1;
  linear[n - 1] = 1;
  costs.emplace_back(n, std::vector<Monomial>{Term(1.0, cubic), Term(-1.0, linear)});
  return Game(PlayerDims::Scalar(n), std::move(costs),
              "morse-smale-chain:n=" + std::to_string(n));
}

Game MakeVanDerPolGame(double mu) {
  if (!(mu > 0.0)) throw InvalidParameter("Van der Pol game needs mu > 0");
  PolynomialCost f1(2, {Term(-1.0, {1, 1})});
  PolynomialCost f2(2, {Term(-0.5 * mu, {0, 2}), Term(0.5 * mu, {2, 2}),
                        Term(1.0, {1, 1})});
  return Game(PlayerDims::Scalar(2), {f1, f2}, "van-der-pol:mu=" + Num(mu));
}

std::vector<std::string> FamilyNames() {
  return {"general-sum-quadratic", "zero-sum-quadratic", "potential-quadratic",
          "morse-smale-chain", "van-der-pol"};
}

FamilyParams ParseFamilyParams(std::string_view text) {
  FamilyParams out;
  if (text.empty()) return out;
  std::stringstream ss{std::string(text)};
  for (std::string token; std::getline(ss, token, ',');) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
      throw InvalidParameter("malformed parameter token '" + token +
                             "' (expected key=value)");
    }
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
      throw InvalidParameter("malformed parameter token '" + token +
                             "' (value is not a number)");
    }
    if (!out.emplace(key, v).second) {
      throw InvalidParameter("duplicate parameter '" + key + "'");
    }
  }
  return out;
}

Game MakeFamily(const std::string& name, const FamilyParams& params) {
  auto take = [&](std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : params) {
      if (!allowed.count(k)) {
        throw InvalidParameter("unknown parameter '" + k + "' for family " + name);
      }
    }
    std::vector<double> values;
    for (const char* k : keys) {
      auto it = params.find(k);
      if (it == params.end()) {
        throw InvalidParameter("missing parameter '" + std::string(k) +
                               "' for family " + name);
      }
      values.push_back(it->second);
    }
    return values;
  };
  if (name == "general-sum-quadratic") {
    auto v = take({"a", "b", "c", "d"});
    return MakeQuadraticGeneralSum(v[0], v[1], v[2], v[3]);
  }
  if (name == "zero-sum-quadratic") {
    auto v = take({"a", "b", "c"});
    return MakeQuadraticZeroSum(v[0], v[1], v[2]);
  }
  if (name == "potential-quadratic") {
    auto v = take({"a", "b", "c"});
    return MakeQuadraticPotential(v[0], v[1], v[2]);
  }
  if (name == "morse-smale-chain") {
    auto v = take({"n"});
    if (v[0] != std::floor(v[0])) throw InvalidParameter("n must be an integer");
    return MakeMorseSmaleChain(static_cast<int>(v[0]));
  }
  if (name == "van-der-pol") {
    auto v = take({"mu"});
    return MakeVanDerPolGame(v[0]);
  }
  throw InvalidParameter("unknown game family '" + name + "'");
}

Game MakeFamilyFromSpec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return MakeFamily(std::string(spec), {});
  return MakeFamily(std::string(spec.substr(0, colon)),
                    ParseFamilyParams(spec.substr(colon + 1)));
}

nlohmann::json GameToJson(const Game& game) {
  nlohmann::json costs = nlohmann::json::array();
  for (const auto& cost : game.costs()) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : cost.terms()) {
      terms.push_back({{"coef", t.coef}, {"exp", t.exponents}});
    }
    costs.push_back(std::move(terms));
  }
  return {{"dims", game.dims().sizes()}, {"costs", costs}, {"label", game.label()}};
}

Game GameFromJson(const nlohmann::json& j) {
  try {
    PlayerDims dims(j.at("dims").get<std::vector<int>>());
    std::vector<PolynomialCost> costs;
    for (const auto& jc : j.at("costs")) {
      std::vector<Monomial> terms;
      for (const auto& jt : jc) {
        terms.push_back({jt.at("coef").get<double>(),
                         jt.at("exp").get<std::vector<int>>()});
      }
      costs.emplace_back(dims.total(), std::move(terms));
    }
    return Game(std::move(dims), std::move(costs), j.value("label", "custom"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("malformed game JSON: ") + e.what());
  }
}

}  // namespace gradplay
