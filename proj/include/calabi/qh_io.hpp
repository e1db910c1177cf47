#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "calabi/qh_algebra.hpp"

namespace calabi::qh {

// Renders terms ordered by descending power of s, then basis order, e.g.
// "4P - A s^-1" or "-12/283 P s^4 + 9/283 A s^3 + 73/283 B s^3 + 16/283 s^2".
std::string to_string(const FrobeniusAlgebra& alg, const AlgebraElement& a);

// Parses sums of products of numbers (p/q), i, s, s^k, basis names,
// parenthesised sub-expressions and the keyword "euler". Juxtaposition and
// '*' both mean quantum multiplication; x^k on a class is a quantum power
// (negative k inverts). Throws ParseError / UnknownName.
AlgebraElement parse_element(const FrobeniusAlgebra& alg, std::string_view text);

// {"text": "...", "coords": {"<class>": FieldElement json, ...}}
nlohmann::json element_to_json(const FrobeniusAlgebra& alg, const AlgebraElement& a);

// Algebra definition file:
// {"basis": [{"name","degree"}...], "unit": idx,
//  "mul": [[i, j, [[l, FieldElement]...]]...], "pairing": [[i, j, "p/q"]...],
//  "n": int, "N": int, "Omega": "p/q"}
// Products not listed are filled from commutativity and the unit law; a
// missing product is an error. Pairing entries are symmetrised.
FrobeniusAlgebra algebra_from_json(const nlohmann::json& j);
nlohmann::json algebra_to_json(const FrobeniusAlgebra& alg);

}  // namespace calabi::qh
