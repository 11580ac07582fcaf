// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace tobdd {

// Exact arithmetic only. Atom normalization and lemma validity are exact
// properties; floating point has no place anywhere in the pipeline.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// num/den as an exact rational; den must be nonzero.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  // cpp_rational's two-argument constructor rejects negative denominators;
  // division normalizes the sign into the numerator.
  return Rational(num) / Rational(den);
}

inline BigInt num(const Rational& r) { return numerator(r); }
inline BigInt den(const Rational& r) { return denominator(r); }

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline std::string to_string(const BigInt& i) { return i.str(); }

}  // namespace tobdd
