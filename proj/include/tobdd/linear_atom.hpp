// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "tobdd/rational.hpp"

namespace tobdd {

/// Relation of a normalized atom. GE/GT inputs are rewritten into the
/// negation of a LT/LE representative during normalization, so they never
/// appear here.
enum class Relation { LE, LT, EQ };

inline std::string relation_symbol(Relation r) {
  switch (r) {
    case Relation::LE: return "<=";
    case Relation::LT: return "<";
    case Relation::EQ: return "=";
  }
  return "?";
}

/// A normalized linear constraint  sum_i c_i * x_i  REL  k  over rational
/// variables.
///
/// Normal form invariants:
///  - variables sorted lexicographically (map order), no zero coefficients;
///  - coefficients are integers with gcd 1;
///  - the coefficient of the lexicographically smallest variable is positive;
///  - REL is one of <=, <, =.
/// Two LinearAtom values are structurally equal iff they denote the same
/// normalized constraint, which is what makes the atom <-> Boolean-variable
/// map a bijection.
struct LinearAtom {
  std::map<std::string, BigInt> coeffs;
  Rational constant;
  Relation rel = Relation::LE;

  bool operator==(const LinearAtom& o) const {
    return rel == o.rel && constant == o.constant && coeffs == o.coeffs;
  }
  bool operator!=(const LinearAtom& o) const { return !(*this == o); }
  bool operator<(const LinearAtom& o) const {
    if (coeffs != o.coeffs) return coeffs < o.coeffs;
    if (constant != o.constant) return constant < o.constant;
    return static_cast<int>(rel) < static_cast<int>(o.rel);
  }

  /// Evaluates the constraint at a (total) rational valuation.
  /// Variables missing from the valuation default to 0.
  bool evaluate(const std::map<std::string, Rational>& valuation) const {
    Rational lhs = 0;
    for (const auto& [var, c] : coeffs) {
      auto it = valuation.find(var);
      if (it != valuation.end()) lhs += Rational(c) * it->second;
    }
    switch (rel) {
      case Relation::LE: return lhs <= constant;
      case Relation::LT: return lhs < constant;
      case Relation::EQ: return lhs == constant;
    }
    return false;
  }

  /// Human-readable form, e.g. "x - 2*y <= -1/2".
  std::string to_string() const {
    std::string out;
    bool first = true;
    for (const auto& [var, c] : coeffs) {
      BigInt mag = abs(c);
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      if (mag != 1) out += mag.str() + "*";
      out += var;
      first = false;
    }
    if (first) out += "0";
    out += " " + relation_symbol(rel) + " " + tobdd::to_string(constant);
    return out;
  }
};

/// Input relations before normalization.
enum class RawRelation { LE, LT, GE, GT, EQ };

/// An un-normalized constraint  sum_i c_i * x_i  REL  k.
struct RawConstraint {
  std::map<std::string, Rational> coeffs;
  Rational rhs;
  RawRelation rel = RawRelation::LE;

  bool evaluate(const std::map<std::string, Rational>& valuation) const {
    Rational lhs = 0;
    for (const auto& [var, c] : coeffs) {
      auto it = valuation.find(var);
      if (it != valuation.end()) lhs += c * it->second;
    }
    switch (rel) {
      case RawRelation::LE: return lhs <= rhs;
      case RawRelation::LT: return lhs < rhs;
      case RawRelation::GE: return lhs >= rhs;
      case RawRelation::GT: return lhs > rhs;
      case RawRelation::EQ: return lhs == rhs;
    }
    return false;
  }
};

/// Result of normalize_atom: either a constant truth value (variable-free
/// input) or a canonical representative plus a polarity flag. When the
/// polarity is false the input is equivalent to the negation of the
/// representative.
struct NormalizedAtom {
  std::optional<LinearAtom> atom;
  bool sign = true;  // polarity if atom, truth value otherwise

  bool is_constant() const { return !atom.has_value(); }
};

/// Rewrites a raw constraint into its canonical representative.
///
/// The leading (lexicographically smallest) variable's coefficient is made
/// positive, coefficients are scaled to integers with gcd 1, and >=/> fold
/// into the negation of the </<= representative. Variable-free constraints
/// fold to a constant. Total on well-formed inputs.
inline NormalizedAtom normalize_atom(const RawConstraint& raw) {
  std::map<std::string, Rational> coeffs;
  for (const auto& [var, c] : raw.coeffs)
    if (c != 0) coeffs.emplace(var, c);

  Rational k = raw.rhs;
  RawRelation rel = raw.rel;

  if (coeffs.empty()) {
    bool value = false;
    switch (rel) {
      case RawRelation::LE: value = 0 <= k; break;
      case RawRelation::LT: value = 0 < k; break;
      case RawRelation::GE: value = 0 >= k; break;
      case RawRelation::GT: value = 0 > k; break;
      case RawRelation::EQ: value = k == 0; break;
    }
    return NormalizedAtom{std::nullopt, value};
  }

  // Make the leading coefficient positive, flipping the relation direction.
  if (coeffs.begin()->second < 0) {
    for (auto& [var, c] : coeffs) c = -c;
    k = -k;
    switch (rel) {
      case RawRelation::LE: rel = RawRelation::GE; break;
      case RawRelation::LT: rel = RawRelation::GT; break;
      case RawRelation::GE: rel = RawRelation::LE; break;
      case RawRelation::GT: rel = RawRelation::LT; break;
      case RawRelation::EQ: break;
    }
  }

  // Scale by lcm(denominators)/gcd(numerators): integer coefficients, gcd 1.
  BigInt common_den = 1;
  for (const auto& [var, c] : coeffs) common_den = lcm(common_den, den(c));
  BigInt common_gcd = 0;
  for (const auto& [var, c] : coeffs)
    common_gcd = gcd(common_gcd, num(c) * (common_den / den(c)));
  Rational scale = make_rational(common_den, common_gcd);

  LinearAtom atom;
  for (const auto& [var, c] : coeffs) {
    Rational scaled = c * scale;
    atom.coeffs.emplace(var, num(scaled));
  }
  atom.constant = k * scale;

  switch (rel) {
    case RawRelation::LE: atom.rel = Relation::LE; return {atom, true};
    case RawRelation::LT: atom.rel = Relation::LT; return {atom, true};
    case RawRelation::GE: atom.rel = Relation::LT; return {atom, false};
    case RawRelation::GT: atom.rel = Relation::LE; return {atom, false};
    case RawRelation::EQ: atom.rel = Relation::EQ; return {atom, true};
  }
  return {atom, true};
}

}  // namespace tobdd
