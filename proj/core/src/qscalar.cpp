#include "qeuclid/qscalar.hpp"

#include "qeuclid/errors.hpp"

namespace qeuclid {

QScalar::QScalar(HalfLaurent num, HalfLaurent den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw ScalarError("zero denominator");
  canonicalize();
}

void QScalar::canonicalize() {
  if (num_.is_zero()) {
    den_ = HalfLaurent::one();
    return;
  }
  // Shift all s^k units out of the denominator.
  int dshift = den_.min_exp();
  if (dshift != 0) {
    den_ = den_.shifted(-dshift);
    num_ = num_.shifted(-dshift);
  }
  if (!den_.is_one()) {
    int v = num_.min_exp();
    HalfLaurent npoly = num_.shifted(-v);
    HalfLaurent g = HalfLaurent::gcd(npoly, den_);
    if (!g.is_one()) {
      npoly = HalfLaurent::divmod(npoly, g).first;
      den_ = HalfLaurent::divmod(den_, g).first;
    }
    num_ = npoly.shifted(v);
  }
  const GaussRational& lead = den_.leading_coeff();
  if (!lead.is_one()) {
    GaussRational inv = lead.inverse();
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
}

QScalar QScalar::operator-() const {
  QScalar out;
  out.num_ = -num_;
  out.den_ = den_;
  return out;
}

QScalar operator+(const QScalar& a, const QScalar& b) {
  QScalar out;
  if (a.den_ == b.den_) {
    out.num_ = a.num_ + b.num_;
    out.den_ = a.den_;
  } else {
    out.num_ = a.num_ * b.den_ + b.num_ * a.den_;
    out.den_ = a.den_ * b.den_;
  }
  out.canonicalize();
  return out;
}

QScalar operator-(const QScalar& a, const QScalar& b) { return a + (-b); }

QScalar operator*(const QScalar& a, const QScalar& b) {
  QScalar out;
  out.num_ = a.num_ * b.num_;
  if (a.den_.is_one()) {
    out.den_ = b.den_;
  } else if (b.den_.is_one()) {
    out.den_ = a.den_;
  } else {
    out.den_ = a.den_ * b.den_;
  }
  out.canonicalize();
  return out;
}

QScalar QScalar::inverse() const {
  if (is_zero()) throw ScalarError("division by zero in Q(i)(s)");
  QScalar out;
  out.num_ = den_;
  out.den_ = num_;
  out.canonicalize();
  return out;
}

QScalar operator/(const QScalar& a, const QScalar& b) { return a * b.inverse(); }

GaussRational QScalar::eval(const GaussRational& point) const {
  GaussRational d = den_.eval(point);
  if (d.is_zero()) throw ScalarError("pole at s = " + point.to_string());
  return num_.eval(point) / d;
}

std::optional<GaussRational> QScalar::classical_limit() const {
  GaussRational one(1);
  GaussRational d = den_.eval(one);
  if (d.is_zero()) return std::nullopt;
  return num_.eval(one) / d;
}

QScalar QScalar::substituted_inverse() const {
  QScalar out;
  out.num_ = num_.substituted_inverse();
  out.den_ = den_.substituted_inverse();
  out.canonicalize();
  return out;
}

std::optional<GaussRational> QScalar::as_constant() const {
  if (is_zero()) return GaussRational(0);
  if (den_.is_one() && num_.is_constant()) return num_.terms()[0].second;
  return std::nullopt;
}

std::string QScalar::to_string() const {
  if (den_.is_one()) return num_.to_string();
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

std::string QScalar::to_q_string() const {
  if (den_.is_one()) return num_.to_q_string();
  return "(" + num_.to_q_string() + ")/(" + den_.to_q_string() + ")";
}

}  // namespace qeuclid
