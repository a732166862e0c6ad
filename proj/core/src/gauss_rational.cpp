#include "qeuclid/gauss_rational.hpp"

#include "qeuclid/errors.hpp"

namespace qeuclid {

GaussRational GaussRational::from_ratio(long num, long den) {
  if (den == 0) throw ScalarError("zero denominator in rational literal");
  mpq_class v(num, den);
  v.canonicalize();
  return GaussRational(v);
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussRational GaussRational::inverse() const {
  if (is_zero()) throw ScalarError("division by zero in Q(i)");
  mpq_class norm = re_ * re_ + im_ * im_;
  return {mpq_class(re_ / norm), mpq_class(-im_ / norm)};
}

GaussRational& GaussRational::operator/=(const GaussRational& o) { return *this *= o.inverse(); }

std::string GaussRational::to_string() const {
  if (sgn(im_) == 0) return re_.get_str();
  if (sgn(re_) == 0) {
    if (im_ == 1) return "i";
    if (im_ == -1) return "-i";
    return im_.get_str() + "*i";
  }
  std::string out = "(" + re_.get_str();
  if (sgn(im_) > 0) {
    out += " + ";
    out += (im_ == 1) ? "i" : im_.get_str() + "*i";
  } else {
    mpq_class a(-im_);
    out += " - ";
    out += (a == 1) ? "i" : a.get_str() + "*i";
  }
  return out + ")";
}

GaussRational pow(const GaussRational& a, long e) {
  if (e < 0) return pow(a.inverse(), -e);
  GaussRational acc(1);
  GaussRational base = a;
  unsigned long k = static_cast<unsigned long>(e);
  while (k != 0) {
    if (k & 1UL) acc *= base;
    base *= base;
    k >>= 1UL;
  }
  return acc;
}

}  // namespace qeuclid
