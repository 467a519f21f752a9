#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gradplay/game.hpp"

namespace gradplay {

// Built-in game families. All are scalar-per-player.

/// f_1 = (a/2) x_1^2 + b x_1 x_2,  f_2 = (d/2) x_2^2 + c x_1 x_2.
Game MakeQuadraticGeneralSum(double a, double b, double c, double d);

/// Costs (f, -f) with f = (a/2) x_1^2 + b x_1 x_2 + (c/2) x_2^2.
Game MakeQuadraticZeroSum(double a, double b, double c);

/// Both players hold f = (a/2) x_1^2 + b x_1 x_2 + (c/2) x_2^2.
Game MakeQuadraticPotential(double a, double b, double c);

/// f_i = x_i x_{i+1} for i < n, f_n = x_n (x_1^2 - 1).
Game MakeMorseSmaleChain(int n);

/// Two-player game whose gradient flow x' = -omega(x) is the Van der Pol
/// oscillator (x_2, mu (1 - x_1^2) x_2 - x_1).
Game MakeVanDerPolGame(double mu);

/// Names accepted by MakeFamily, e.g. "zero-sum-quadratic".
std::vector<std::string> FamilyNames();

using FamilyParams = std::map<std::string, double>;

/// Parses "a=2,b=2,c=1". Throws InvalidParameter naming the offending token.
FamilyParams ParseFamilyParams(std::string_view text);

/// Builds a family by name. Unknown names, unknown keys, and missing keys are
/// InvalidParameter errors.
Game MakeFamily(const std::string& name, const FamilyParams& params);

/// "zero-sum-quadratic:a=2,b=2,c=1" or just a family name with no parameters.
Game MakeFamilyFromSpec(std::string_view spec);

/// {"dims":[...], "costs":[[{"coef":r,"exp":[...]},...],...], "label":str}
nlohmann::json GameToJson(const Game& game);
Game GameFromJson(const nlohmann::json& j);

}  // namespace gradplay
