#pragma once

#include <optional>
#include <string>

#include "qeuclid/gauss_rational.hpp"
#include "qeuclid/half_laurent.hpp"

namespace qeuclid {

// Element of the field Q(i)(s), s = q^(1/2), as a canonical fraction:
//   * den is a genuine polynomial (min exponent 0) with nonzero constant term,
//   * den's highest-exponent coefficient is 1,
//   * num's polynomial part and den are coprime (all s^k units live in num),
//   * zero is 0/1.
// Equality is structural equality of canonical forms.
class QScalar {
 public:
  QScalar() : num_(), den_(HalfLaurent::one()) {}
  QScalar(long v) : QScalar(GaussRational(v)) {}  // NOLINT: implicit by design
  explicit QScalar(const GaussRational& c)
      : num_(HalfLaurent::monomial(0, c)), den_(HalfLaurent::one()) {}
  explicit QScalar(HalfLaurent num) : num_(std::move(num)), den_(HalfLaurent::one()) {}
  QScalar(HalfLaurent num, HalfLaurent den);  // canonicalizes; throws on zero den

  static QScalar zero() { return QScalar(); }
  static QScalar one() { return QScalar(1); }
  static QScalar imaginary_unit() { return QScalar(GaussRational::imaginary_unit()); }
  static QScalar s_power(int m) { return QScalar(HalfLaurent::monomial(m, GaussRational(1))); }
  static QScalar from_ratio(long num, long den) { return QScalar(GaussRational::from_ratio(num, den)); }

  const HalfLaurent& num() const { return num_; }
  const HalfLaurent& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }

  QScalar operator-() const;
  friend QScalar operator+(const QScalar& a, const QScalar& b);
  friend QScalar operator-(const QScalar& a, const QScalar& b);
  friend QScalar operator*(const QScalar& a, const QScalar& b);
  friend QScalar operator/(const QScalar& a, const QScalar& b);
  QScalar& operator+=(const QScalar& o) { return *this = *this + o; }
  QScalar& operator-=(const QScalar& o) { return *this = *this - o; }
  QScalar& operator*=(const QScalar& o) { return *this = *this * o; }
  QScalar& operator/=(const QScalar& o) { return *this = *this / o; }

  QScalar inverse() const;  // throws ScalarError on zero

  bool operator==(const QScalar& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const QScalar& o) const { return !(*this == o); }

  // Exact evaluation at s = point; throws ScalarError at a pole.
  GaussRational eval(const GaussRational& point) const;
  // Value at s = 1 (q = 1), or nullopt when the scalar has a pole there.
  std::optional<GaussRational> classical_limit() const;

  // s -> 1/s on the whole fraction (the q <-> q^(-1) involution).
  QScalar substituted_inverse() const;

  // Constant fractions (degree-0 num and den) reduce to a GaussRational.
  std::optional<GaussRational> as_constant() const;

  // "p(s)" or "(p(s))/(r(s))" with integer exponents of s.
  std::string to_string() const;
  // Same value in q^(m/2) notation, parseable by the expression grammar.
  std::string to_q_string() const;

 private:
  void canonicalize();

  HalfLaurent num_, den_;
};

}  // namespace qeuclid
