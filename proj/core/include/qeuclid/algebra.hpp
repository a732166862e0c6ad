#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qeuclid/scalar_context.hpp"

namespace qeuclid {

// Exponent record of one normal-ordered monomial
//   Lambda^alpha K^beta r_1^{gamma_1} ... r_n^{gamma_n} (x^{-n})^{a_-n} ... (x^n)^{a_n}.
// gamma is indexed by r-index - 1; xpow follows the alphabet order.
struct Mono {
  int alpha = 0;
  int beta = 0;
  std::vector<int> gamma;
  std::vector<int> xpow;

  friend auto operator<=>(const Mono&, const Mono&) = default;
};

// Canonical sum of normal-ordered monomials; empty map is structural zero.
template <class F>
struct AlgebraElement {
  std::map<Mono, F> terms;

  bool structurally_zero() const { return terms.empty(); }
  void add_term(const Mono& m, const F& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  void add_all(const AlgebraElement& o) {
    for (const auto& [m, c] : o.terms) add_term(m, c);
  }
  void add_all_scaled(const AlgebraElement& o, const F& s) {
    if (s.is_zero()) return;
    for (const auto& [m, c] : o.terms) add_term(m, c * s);
  }
  bool operator==(const AlgebraElement& o) const { return terms == o.terms; }
};

// Normal-ordering engine for the extended coordinate algebra of R^N_q.
// Rewriting uses only the defining exchange rules; the sole non-q-commuting
// swap [x^i, x^{-i}] injects a precomputed x-polynomial, so the x-sector stays
// a pure PBW basis and zero-testing is a decision procedure.
template <class F>
class Algebra {
 public:
  using Elem = AlgebraElement<F>;

  explicit Algebra(const ScalarContext<F>& ctx) : ctx_(&ctx) {
    const int n = ctx.n();
    // r_0^2 = (x^0)^2 for odd N seeds the commutator tower.
    Elem r2;
    if (ctx.odd()) {
      Mono m = blank();
      m.xpow[pos(0)] = 2;
      r2.add_term(m, ctx.one());
    }
    if (ctx.odd()) r2_of_shell_.push_back(r2);  // shell 0
    for (int i = 1; i <= n; ++i) {
      Elem c_i;
      if (i == 1) {
        if (ctx.odd()) c_i.add_all_scaled(r2, ctx.h());  // [x^1, x^-1] = h r_0^2
        // even N: [x^1, x^-1] = 0
      } else {
        c_i.add_all_scaled(r2, ctx.k() * ctx.omega(i - 1).inverse());
      }
      xx_comm_.push_back(c_i);
      // r_i^2 = r_{i-1}^2 + omega_i x^{-i} x^i + q^{-rho_i} C_i.
      Mono m = blank();
      m.xpow[pos(-i)] = 1;
      m.xpow[pos(i)] = 1;
      r2.add_term(m, ctx.omega(i));
      r2.add_all_scaled(c_i, ctx.q_half(-ctx.rho2(i)));
      r2_of_shell_.push_back(r2);
    }
  }

  const ScalarContext<F>& ctx() const { return *ctx_; }

  int pos(int i) const {
    return (ctx_->odd() || i < 0) ? i + ctx_->n() : i + ctx_->n() - 1;
  }

  Mono blank() const {
    Mono m;
    m.gamma.assign(ctx_->n(), 0);
    m.xpow.assign(ctx_->N(), 0);
    return m;
  }

  // --- constructors -------------------------------------------------------

  Elem zero() const { return {}; }
  Elem scalar(const F& c) const {
    Elem e;
    e.add_term(blank(), c);
    return e;
  }
  Elem one() const { return scalar(ctx_->one()); }

  Elem x(int i, int power = 1) const {
    ctx_->require_index(i);
    if (power < 0 && !ctx_->is_invertible_coord(i))
      throw ConfigError("x(" + std::to_string(i) + ") is not invertible");
    Mono m = blank();
    m.xpow[pos(i)] = power;
    Elem e;
    e.add_term(m, ctx_->one());
    return e;
  }

  Elem r(int i, int power = 1) const {
    if (i < 1 || i > ctx_->n()) throw ConfigError("r-index out of range");
    Mono m = blank();
    m.gamma[i - 1] = power;
    Elem e;
    e.add_term(m, ctx_->one());
    return e;
  }

  Elem L(int power = 1) const {
    Mono m = blank();
    m.alpha = power;
    Elem e;
    e.add_term(m, ctx_->one());
    return e;
  }

  Elem K(int power = 1) const {
    if (ctx_->odd()) throw ConfigError("K exists only for even N");
    Mono m = blank();
    m.beta = power;
    Elem e;
    e.add_term(m, ctx_->one());
    return e;
  }

  // [x^i, x^{-i}] for i >= 1, expanded in the x-sector.
  const Elem& xx_commutator(int i) const { return xx_comm_.at(i - 1); }
  // r_i^2 expanded in the x-sector (shell 0 = (x^0)^2 exists only for odd N).
  const Elem& r_squared(int i) const {
    return r2_of_shell_.at(ctx_->odd() ? i : i - 1);
  }

  // --- arithmetic ---------------------------------------------------------

  Elem add(Elem a, const Elem& b) const {
    a.add_all(b);
    return a;
  }
  Elem sub(Elem a, const Elem& b) const {
    for (const auto& [m, c] : b.terms) a.add_term(m, -c);
    return a;
  }
  Elem neg(const Elem& a) const {
    Elem out;
    for (const auto& [m, c] : a.terms) out.terms.emplace(m, -c);
    return out;
  }
  Elem scale(const Elem& a, const F& s) const {
    Elem out;
    out.add_all_scaled(a, s);
    return out;
  }

  Elem mul(const Elem& a, const Elem& b) const {
    Elem out;
    for (const auto& [mb, cb] : b.terms) {
      // Move mb's Lambda/K/r block left past every monomial of a.
      Elem running;
      for (const auto& [ma, ca] : a.terms) {
        long e = 0;  // accumulated integer power of q
        e += static_cast<long>(mb.alpha) * (x_degree(ma) + r_degree(ma));
        if (!ctx_->odd() && mb.beta != 0) e += static_cast<long>(mb.beta) * k_weight(ma);
        for (int i = 1; i <= ctx_->n(); ++i)
          if (mb.gamma[i - 1] != 0)
            e += static_cast<long>(mb.gamma[i - 1]) * r_crossing(i, ma);
        Mono base = ma;
        base.alpha += mb.alpha;
        base.beta += mb.beta;
        for (int i = 0; i < ctx_->n(); ++i) base.gamma[i] += mb.gamma[i];
        running.add_term(base, ca * cb * ctx_->q_power(e));
      }
      // Insert mb's x-generators one by one, in increasing index order.
      for (int j : ctx_->alphabet()) {
        int e = mb.xpow[pos(j)];
        if (e == 0) continue;
        int sigma = e > 0 ? 1 : -1;
        for (int rep = 0; rep < (e > 0 ? e : -e); ++rep) running = times_x(running, j, sigma);
      }
      out.add_all(running);
    }
    return out;
  }

  Elem commutator(const Elem& a, const Elem& b) const { return sub(mul(a, b), mul(b, a)); }

  // Exact inverse of a single invertible monomial (all x-exponents on
  // invertible coordinates); built as the reversed product of generator
  // inverses so the q-factors come out right.
  Elem invert_monomial(const Elem& a) const {
    if (a.terms.size() != 1) throw UnsupportedInput("only monomials can be inverted");
    const auto& [m, c] = *a.terms.begin();
    for (int i : ctx_->alphabet())
      if (m.xpow[pos(i)] != 0 && !ctx_->is_invertible_coord(i))
        throw UnsupportedInput("monomial contains a non-invertible coordinate");
    Elem out = scalar(c.inverse());
    for (auto it = ctx_->alphabet().rbegin(); it != ctx_->alphabet().rend(); ++it)
      if (int e = m.xpow[pos(*it)]; e != 0) out = mul(out, x(*it, -e));
    for (int i = ctx_->n(); i >= 1; --i)
      if (m.gamma[i - 1] != 0) out = mul(out, r(i, -m.gamma[i - 1]));
    if (m.beta != 0) out = mul(out, K(-m.beta));
    if (m.alpha != 0) out = mul(out, L(-m.alpha));
    return out;
  }

  // --- zero test ----------------------------------------------------------

  // Sound and complete: split by the group-like (alpha, beta) grading and the
  // r-parity grading; clear r's by right-multiplying with r_i (injective),
  // expand even r-powers through r_i^2 = sum g_kl x^k x^l, and read off
  // PBW coefficients in the (localized) x-basis.
  bool is_zero(const Elem& u) const {
    if (u.terms.empty()) return true;
    using ClassKey = std::tuple<int, int, std::vector<int>>;
    std::map<ClassKey, Elem> classes;
    for (const auto& [m, c] : u.terms) {
      std::vector<int> parity(ctx_->n());
      for (int i = 0; i < ctx_->n(); ++i) parity[i] = ((m.gamma[i] % 2) + 2) % 2;
      classes[{m.alpha, m.beta, parity}].add_term(m, c);
    }
    for (auto& [key, cls] : classes) {
      // Right-multiply by r_i^{t_i} to make every gamma_i even and >= 0.
      Mono shift = blank();
      bool need_shift = false;
      for (int i = 0; i < ctx_->n(); ++i) {
        int min_gamma = 0;
        for (const auto& [m, c] : cls.terms) min_gamma = std::min(min_gamma, m.gamma[i]);
        int t = -min_gamma;
        if ((t % 2 + 2) % 2 != std::get<2>(key)[i]) ++t;
        if (t > 0) {
          shift.gamma[i] = t;
          need_shift = true;
        }
      }
      if (need_shift) {
        Elem rmono;
        rmono.add_term(shift, ctx_->one());
        cls = mul(cls, rmono);
      }
      Elem expanded;
      for (const auto& [m, c] : cls.terms) {
        Mono lk = blank();
        lk.alpha = m.alpha;
        lk.beta = m.beta;
        Elem e;
        e.add_term(lk, c);
        for (int i = 1; i <= ctx_->n(); ++i) {
          int twice = m.gamma[i - 1];
          for (int rep = 0; rep < twice / 2; ++rep) e = mul(e, r_squared(i));
        }
        Mono xm = blank();
        xm.xpow = m.xpow;
        Elem xe;
        xe.add_term(xm, ctx_->one());
        expanded.add_all(mul(e, xe));
      }
      if (!expanded.terms.empty()) return false;
    }
    return true;
  }

  // --- canonical text -----------------------------------------------------

  std::string to_string(const Elem& u) const {
    if (u.terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : u.terms) {
      F coeff = c;
      if (first) {
        first = false;
        if (field_negative_looking(coeff)) {
          out += "-";
          coeff = -coeff;
        }
      } else if (field_negative_looking(coeff)) {
        out += " - ";
        coeff = -coeff;
      } else {
        out += " + ";
      }
      std::string mono = mono_string(m);
      if (mono.empty()) {
        out += coeff_string(coeff);
      } else if (coeff.is_one()) {
        out += mono;
      } else {
        out += coeff_string(coeff) + " * " + mono;
      }
    }
    return out;
  }

 private:
  int x_degree(const Mono& m) const {
    int d = 0;
    for (int e : m.xpow) d += e;
    return d;
  }
  int r_degree(const Mono& m) const {
    int d = 0;
    for (int e : m.gamma) d += e;
    return d;
  }
  int k_weight(const Mono& m) const { return m.xpow[pos(-1)] - m.xpow[pos(1)]; }
  // Sum of crossing exponents of r_i with the x-block: x^j r_i = q^{c} r_i x^j,
  // c = +1 for j < -i, -1 for j > i, 0 for |j| <= i.
  int r_crossing(int i, const Mono& m) const {
    int e = 0;
    for (int j : ctx_->alphabet()) {
      if (j < -i) e += m.xpow[pos(j)];
      if (j > i) e -= m.xpow[pos(j)];
    }
    return e;
  }

  // 1 + q^-2 + ... + q^{-2(a-1)}.
  F geometric(int a) const {
    F acc = ctx_->zero();
    for (int m = 0; m < a; ++m) acc += ctx_->q_power(-2 * m);
    return acc;
  }

  Elem times_x(const Elem& u, int j, int sigma) const {
    Elem out;
    for (const auto& [m, c] : u.terms) mul_mono_x(out, m, c, j, sigma);
    return out;
  }

  // Append x^j^{sigma} to the right of (m, c) and restore normal order.
  void mul_mono_x(Elem& out, const Mono& m, const F& c, int j, int sigma) const {
    F coeff = c;
    const auto& alpha_list = ctx_->alphabet();
    for (auto it = alpha_list.rbegin(); it != alpha_list.rend(); ++it) {
      int t = *it;
      if (t <= j) break;
      int a = m.xpow[pos(t)];
      if (a == 0) continue;
      if (t == -j) {
        const Elem& c_tensor = xx_commutator(t);
        if (c_tensor.terms.empty()) continue;  // even N, t == 1: exact commute
        // (x^t)^a x^{-t} = x^{-t} (x^t)^a + geometric(a) C_t (x^t)^{a-1}.
        Mono prefix = m;
        Mono suffix = blank();
        for (int u2 : alpha_list) {
          if (u2 >= t) {
            suffix.xpow[pos(u2)] = m.xpow[pos(u2)];
            prefix.xpow[pos(u2)] = 0;
          }
        }
        suffix.xpow[pos(t)] -= 1;
        Elem pre;
        pre.add_term(prefix, coeff * geometric(a));
        Elem suf;
        suf.add_term(suffix, ctx_->one());
        out.add_all(mul(mul(pre, c_tensor), suf));
        // term 1 continues through the loop with no extra factor
      } else {
        coeff *= ctx_->q_power(-static_cast<long>(sigma) * a);
      }
    }
    Mono m1 = m;
    m1.xpow[pos(j)] += sigma;
    out.add_term(m1, coeff);
  }

  std::string mono_string(const Mono& m) const {
    std::vector<std::string> parts;
    auto piece = [&parts](const std::string& gen, int e) {
      if (e == 0) return;
      if (e == 1)
        parts.push_back(gen);
      else
        parts.push_back(gen + "^" + std::to_string(e));
    };
    piece("L", m.alpha);
    piece("K", m.beta);
    for (int i = 1; i <= ctx_->n(); ++i) piece("r(" + std::to_string(i) + ")", m.gamma[i - 1]);
    for (int i : ctx_->alphabet()) piece("x(" + std::to_string(i) + ")", m.xpow[pos(i)]);
    std::string out;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (p) out += " * ";
      out += parts[p];
    }
    return out;
  }

  static bool field_negative_looking(const QScalar& v) {
    return !v.num().is_zero() && v.num().leading_coeff().is_negative_looking();
  }
  static bool field_negative_looking(const GaussRational& v) { return v.is_negative_looking(); }
  static std::string coeff_string(const QScalar& v) {
    bool wrap = v.den().is_one() && v.num().terms().size() > 1;
    std::string s = v.to_q_string();
    return wrap ? "(" + s + ")" : s;
  }
  static std::string coeff_string(const GaussRational& v) { return v.to_string(); }

  const ScalarContext<F>* ctx_;
  std::vector<Elem> xx_comm_;      // C_i, index i-1
  std::vector<Elem> r2_of_shell_;  // r_i^2 expansions
};

}  // namespace qeuclid
