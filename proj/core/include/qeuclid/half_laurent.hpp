#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qeuclid/gauss_rational.hpp"

namespace qeuclid {

// Laurent polynomial in the formal variable s = q^(1/2), with Gaussian-rational
// coefficients. Terms are kept sorted by ascending exponent with no zeros;
// the empty term list is the zero polynomial.
class HalfLaurent {
 public:
  using Term = std::pair<int, GaussRational>;

  HalfLaurent() = default;
  static HalfLaurent zero() { return {}; }
  static HalfLaurent one() { return monomial(0, GaussRational(1)); }
  static HalfLaurent monomial(int exp, GaussRational coeff);
  // Normalizes arbitrary term lists (sorts, merges, drops zeros).
  static HalfLaurent from_terms(std::vector<Term> terms);

  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  bool is_monomial() const { return terms_.size() == 1; }
  // Constant (exponent-0 monomial or zero)?
  bool is_constant() const;

  int min_exp() const;  // requires nonzero
  int max_exp() const;  // requires nonzero
  const GaussRational& leading_coeff() const;  // coefficient at max_exp; requires nonzero
  const std::vector<Term>& terms() const { return terms_; }

  HalfLaurent operator-() const;
  friend HalfLaurent operator+(const HalfLaurent& a, const HalfLaurent& b);
  friend HalfLaurent operator-(const HalfLaurent& a, const HalfLaurent& b);
  friend HalfLaurent operator*(const HalfLaurent& a, const HalfLaurent& b);
  HalfLaurent& operator+=(const HalfLaurent& o) { return *this = *this + o; }
  HalfLaurent& operator-=(const HalfLaurent& o) { return *this = *this - o; }
  HalfLaurent& operator*=(const HalfLaurent& o) { return *this = *this * o; }

  HalfLaurent scaled(const GaussRational& c) const;
  HalfLaurent shifted(int dexp) const;  // multiply by s^dexp
  // s -> 1/s (negates every exponent).
  HalfLaurent substituted_inverse() const;

  bool operator==(const HalfLaurent& o) const { return terms_ == o.terms_; }
  bool operator!=(const HalfLaurent& o) const { return !(*this == o); }

  // Exact value at s = point (point != 0 required when negative exponents occur).
  GaussRational eval(const GaussRational& point) const;

  // Polynomial helpers; both operands must have min_exp >= 0.
  // Euclidean division: a = q*b + r with deg r < deg b.
  static std::pair<HalfLaurent, HalfLaurent> divmod(const HalfLaurent& a, const HalfLaurent& b);
  // Monic gcd; gcd(0,0) = 0.
  static HalfLaurent gcd(HalfLaurent a, HalfLaurent b);

  // "s^2 - 2*s + 1/2" (descending exponents); "0" for zero.
  std::string to_string() const;
  // Same polynomial written in q^(m/2) notation: "q - 2*q^1/2 + 1/2".
  std::string to_q_string() const;

 private:
  std::vector<Term> terms_;
};

}  // namespace qeuclid
