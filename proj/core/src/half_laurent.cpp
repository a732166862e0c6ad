#include "qeuclid/half_laurent.hpp"

#include <algorithm>
#include <map>

#include "qeuclid/errors.hpp"

namespace qeuclid {

HalfLaurent HalfLaurent::monomial(int exp, GaussRational coeff) {
  HalfLaurent p;
  if (!coeff.is_zero()) p.terms_.emplace_back(exp, std::move(coeff));
  return p;
}

HalfLaurent HalfLaurent::from_terms(std::vector<Term> terms) {
  std::map<int, GaussRational> acc;
  for (auto& [e, c] : terms) acc[e] += c;
  HalfLaurent p;
  for (auto& [e, c] : acc)
    if (!c.is_zero()) p.terms_.emplace_back(e, std::move(c));
  return p;
}

bool HalfLaurent::is_one() const {
  return terms_.size() == 1 && terms_[0].first == 0 && terms_[0].second.is_one();
}

bool HalfLaurent::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0);
}

int HalfLaurent::min_exp() const {
  if (terms_.empty()) throw ScalarError("min_exp of zero polynomial");
  return terms_.front().first;
}

int HalfLaurent::max_exp() const {
  if (terms_.empty()) throw ScalarError("max_exp of zero polynomial");
  return terms_.back().first;
}

const GaussRational& HalfLaurent::leading_coeff() const {
  if (terms_.empty()) throw ScalarError("leading_coeff of zero polynomial");
  return terms_.back().second;
}

HalfLaurent HalfLaurent::operator-() const {
  HalfLaurent p;
  p.terms_.reserve(terms_.size());
  for (const auto& [e, c] : terms_) p.terms_.emplace_back(e, -c);
  return p;
}

HalfLaurent operator+(const HalfLaurent& a, const HalfLaurent& b) {
  HalfLaurent out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  auto ia = a.terms_.begin(), ib = b.terms_.begin();
  while (ia != a.terms_.end() && ib != b.terms_.end()) {
    if (ia->first < ib->first) {
      out.terms_.push_back(*ia++);
    } else if (ib->first < ia->first) {
      out.terms_.push_back(*ib++);
    } else {
      GaussRational c = ia->second + ib->second;
      if (!c.is_zero()) out.terms_.emplace_back(ia->first, std::move(c));
      ++ia;
      ++ib;
    }
  }
  out.terms_.insert(out.terms_.end(), ia, a.terms_.end());
  out.terms_.insert(out.terms_.end(), ib, b.terms_.end());
  return out;
}

HalfLaurent operator-(const HalfLaurent& a, const HalfLaurent& b) { return a + (-b); }

HalfLaurent operator*(const HalfLaurent& a, const HalfLaurent& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.terms_.size() == 1) {
    return b.scaled(a.terms_[0].second).shifted(a.terms_[0].first);
  }
  if (b.terms_.size() == 1) {
    return a.scaled(b.terms_[0].second).shifted(b.terms_[0].first);
  }
  std::map<int, GaussRational> acc;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) acc[ea + eb] += ca * cb;
  HalfLaurent out;
  for (auto& [e, c] : acc)
    if (!c.is_zero()) out.terms_.emplace_back(e, std::move(c));
  return out;
}

HalfLaurent HalfLaurent::scaled(const GaussRational& c) const {
  if (c.is_zero()) return {};
  HalfLaurent p;
  p.terms_.reserve(terms_.size());
  for (const auto& [e, v] : terms_) p.terms_.emplace_back(e, v * c);
  return p;
}

HalfLaurent HalfLaurent::shifted(int dexp) const {
  HalfLaurent p(*this);
  for (auto& [e, v] : p.terms_) e += dexp;
  return p;
}

HalfLaurent HalfLaurent::substituted_inverse() const {
  HalfLaurent p;
  p.terms_.reserve(terms_.size());
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    p.terms_.emplace_back(-it->first, it->second);
  return p;
}

GaussRational HalfLaurent::eval(const GaussRational& point) const {
  GaussRational acc(0);
  for (const auto& [e, c] : terms_) acc += c * pow(point, e);
  return acc;
}

std::pair<HalfLaurent, HalfLaurent> HalfLaurent::divmod(const HalfLaurent& a,
                                                        const HalfLaurent& b) {
  if (b.is_zero()) throw ScalarError("polynomial division by zero");
  if ((!a.is_zero() && a.min_exp() < 0) || b.min_exp() < 0)
    throw ScalarError("divmod requires genuine polynomials");
  HalfLaurent quot, rem = a;
  while (!rem.is_zero() && rem.max_exp() >= b.max_exp()) {
    HalfLaurent t =
        monomial(rem.max_exp() - b.max_exp(), rem.leading_coeff() / b.leading_coeff());
    quot += t;
    rem -= t * b;
  }
  return {std::move(quot), std::move(rem)};
}

HalfLaurent HalfLaurent::gcd(HalfLaurent a, HalfLaurent b) {
  while (!b.is_zero()) {
    HalfLaurent r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.scaled(a.leading_coeff().inverse());
}

namespace {

std::string render(const std::vector<HalfLaurent::Term>& terms, bool q_form) {
  if (terms.empty()) return "0";
  auto power_str = [q_form](int e) -> std::string {
    if (q_form) {
      if (e == 2) return "q";
      if (e % 2 == 0) return "q^" + std::to_string(e / 2);
      return "q^" + std::to_string(e) + "/2";
    }
    if (e == 1) return "s";
    return "s^" + std::to_string(e);
  };
  std::string out;
  bool first = true;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    const auto& [e, c] = *it;
    GaussRational coeff = c;
    if (first) {
      first = false;
    } else if (coeff.is_negative_looking()) {
      out += " - ";
      coeff = -coeff;
    } else {
      out += " + ";
    }
    if (e == 0) {
      out += coeff.to_string();
    } else if (coeff.is_one()) {
      out += power_str(e);
    } else if ((-coeff).is_one()) {
      out += "-" + power_str(e);
    } else {
      out += coeff.to_string() + "*" + power_str(e);
    }
  }
  return out;
}

}  // namespace

std::string HalfLaurent::to_string() const { return render(terms_, /*q_form=*/false); }

std::string HalfLaurent::to_q_string() const { return render(terms_, /*q_form=*/true); }

}  // namespace qeuclid
