#pragma once

#include <gmpxx.h>

#include <string>

namespace qeuclid {

// Element of Q(i): a pair of arbitrary-precision rationals.
// Always stored with both components fully reduced (mpq_class canonical form),
// so equality is structural.
class GaussRational {
 public:
  GaussRational() : re_(0), im_(0) {}
  GaussRational(long v) : re_(v), im_(0) {}  // NOLINT: implicit by design
  explicit GaussRational(mpq_class re) : re_(std::move(re)), im_(0) {}
  GaussRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussRational imaginary_unit() { return {mpq_class(0), mpq_class(1)}; }
  // num/den with den != 0; reduced on construction.
  static GaussRational from_ratio(long num, long den);

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  // True when the canonical printed form would start with '-'.
  bool is_negative_looking() const {
    return sgn(re_) < 0 || (sgn(re_) == 0 && sgn(im_) < 0);
  }

  GaussRational operator-() const { return {mpq_class(-re_), mpq_class(-im_)}; }
  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  GaussRational& operator*=(const GaussRational& o);
  GaussRational& operator/=(const GaussRational& o);

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }

  GaussRational inverse() const;  // throws ScalarError on zero

  bool operator==(const GaussRational& o) const { return re_ == o.re_ && im_ == o.im_; }
  bool operator!=(const GaussRational& o) const { return !(*this == o); }
  // Deterministic total order (re, then im); used for canonical printing/sorting only.
  bool operator<(const GaussRational& o) const {
    int c = cmp(re_, o.re_);
    if (c != 0) return c < 0;
    return cmp(im_, o.im_) < 0;
  }

  // Canonical text: "3", "-1/2", "i", "-2/3*i", "(1 - 2*i)".
  std::string to_string() const;

 private:
  mpq_class re_, im_;
};

// a^e for integer e (e < 0 requires a != 0).
GaussRational pow(const GaussRational& a, long e);

}  // namespace qeuclid
