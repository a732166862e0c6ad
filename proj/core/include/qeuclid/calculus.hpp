#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/scalar_context.hpp"

namespace qeuclid {

enum class CalculusKind { plain, barred };

inline const char* tag_name(CalculusKind tag) {
  return tag == CalculusKind::plain ? "plain" : "barred";
}

// Left-coefficient one-form: sum_k coeffs[k] * xi^k (or xibar^k).
template <class F>
struct OneForm {
  std::map<int, AlgebraElement<F>> coeffs;

  void add_term(int slot, const AlgebraElement<F>& e) {
    if (e.structurally_zero()) return;
    auto [it, inserted] = coeffs.try_emplace(slot, e);
    if (!inserted) {
      it->second.add_all(e);
      if (it->second.structurally_zero()) coeffs.erase(it);
    }
  }
  bool operator==(const OneForm& o) const { return coeffs == o.coeffs; }
};

// Left-coefficient element of the tensor square: sum coeffs[(i,j)] xi^i (x) xi^j.
template <class F>
struct TensorSquare {
  std::map<std::pair<int, int>, AlgebraElement<F>> coeffs;

  void add_term(const std::pair<int, int>& slot, const AlgebraElement<F>& e) {
    if (e.structurally_zero()) return;
    auto [it, inserted] = coeffs.try_emplace(slot, e);
    if (!inserted) {
      it->second.add_all(e);
      if (it->second.structurally_zero()) coeffs.erase(it);
    }
  }
  bool operator==(const TensorSquare& o) const { return coeffs == o.coeffs; }
};

// Wedge two-form. Canonical representative: the coefficient array equals its
// own antisymmetric projection on the form-index pair, so zero-testing is
// coefficient-wise.
template <class F>
struct TwoForm {
  std::map<std::pair<int, int>, AlgebraElement<F>> coeffs;
};

// One covariant differential calculus over the coordinate algebra. The plain
// exchange rule is x^i xi^j = q Rhat^{ij}_{kl} xi^k x^l; the barred one uses
// q^{-1} Rhat^{-1}. `transport` is the inverse map xi^k x^l -> x xi, extended
// to Lambda, K, the top radius r_n and the coordinate inverses.
template <class F>
class Calculus {
 public:
  using Elem = AlgebraElement<F>;

  Calculus(const Algebra<F>& alg, const TensorBundle<F>& tensors, CalculusKind kind)
      : alg_(&alg), tensors_(&tensors), kind_(kind) {
    const auto& ctx = alg.ctx();
    const F q = ctx.q_power(1);
    const F qinv = ctx.q_power(-1);
    if (kind == CalculusKind::plain) {
      exchange_ = tensors.rhat.scaled(q);
      transport_ = tensors.rhat_inv.scaled(qinv);
    } else {
      exchange_ = tensors.rhat_inv.scaled(qinv);
      transport_ = tensors.rhat.scaled(q);
    }
    for (int c : ctx.alphabet())
      if (ctx.is_invertible_coord(c)) solve_inverse_transport(c);
    verify_radius_rule();
  }

  const Algebra<F>& algebra() const { return *alg_; }
  CalculusKind kind() const { return kind_; }
  const SparseTensor4<F>& exchange_tensor() const { return exchange_; }
  const SparseTensor4<F>& transport_tensor() const { return transport_; }

  // --- one-form plumbing ----------------------------------------------------

  OneForm<F> basis(int k) const {
    alg_->ctx().require_index(k);
    OneForm<F> w;
    w.add_term(k, alg_->one());
    return w;
  }

  // Canonical form of f * xi^j: with the left-coefficient convention this is
  // direct; the exchange relation itself is checked via `transport`.
  OneForm<F> push_coefficient(int j, const Elem& f) const {
    alg_->ctx().require_index(j);
    OneForm<F> w;
    w.add_term(j, f);
    return w;
  }

  OneForm<F> add(OneForm<F> u, const OneForm<F>& v) const {
    for (const auto& [slot, e] : v.coeffs) u.add_term(slot, e);
    return u;
  }
  OneForm<F> sub(OneForm<F> u, const OneForm<F>& v) const {
    for (const auto& [slot, e] : v.coeffs) u.add_term(slot, alg_->neg(e));
    return u;
  }
  OneForm<F> scale(const OneForm<F>& u, const F& c) const {
    OneForm<F> out;
    for (const auto& [slot, e] : u.coeffs) out.add_term(slot, alg_->scale(e, c));
    return out;
  }
  OneForm<F> mul_left(const Elem& f, const OneForm<F>& u) const {
    OneForm<F> out;
    for (const auto& [slot, e] : u.coeffs) out.add_term(slot, alg_->mul(f, e));
    return out;
  }
  OneForm<F> mul_right(const OneForm<F>& u, const Elem& f) const {
    OneForm<F> out;
    for (const auto& [slot, e] : u.coeffs) {
      OneForm<F> moved = transport(slot, f);
      for (const auto& [slot2, e2] : moved.coeffs) out.add_term(slot2, alg_->mul(e, e2));
    }
    return out;
  }

  // Structural-zero test is complete here: one-forms are a free left module
  // on the basis forms, so the form vanishes iff every coefficient does.
  bool is_zero(const OneForm<F>& u) const {
    for (const auto& [slot, e] : u.coeffs)
      if (!alg_->is_zero(e)) return false;
    return true;
  }

  std::string to_string(const OneForm<F>& u) const {
    if (u.coeffs.empty()) return "0";
    const char* gen = kind_ == CalculusKind::plain ? "xi(" : "xibar(";
    std::string out;
    for (const auto& [slot, e] : u.coeffs) {
      if (!out.empty()) out += " + ";
      out += "(" + alg_->to_string(e) + ") * " + gen + std::to_string(slot) + ")";
    }
    return out;
  }

  // Rewrite xi^k * f with all algebra factors moved left of the forms.
  OneForm<F> transport(int k, const Elem& f) const {
    const auto& ctx = alg_->ctx();
    ctx.require_index(k);
    OneForm<F> out;
    for (const auto& [m, c] : f.terms) {
      for (int i = 1; i < ctx.n(); ++i)
        if (m.gamma[i - 1] != 0)
          throw UnsupportedInput("cannot move a form past r(" + std::to_string(i) +
                                 ") for i < n");
      F fac = c;
      int gn = m.gamma[ctx.n() - 1];
      if (gn != 0)  // xi r_n = q^{-1} r_n xi; barred forms pick the inverse factor
        fac *= ctx.q_power(kind_ == CalculusKind::plain ? -gn : gn);
      if (!ctx.odd() && m.beta != 0) fac *= ctx.q_power(-m.beta * k_weight_of_form(k));
      Mono head = alg_->blank();
      head.alpha = m.alpha;
      head.beta = m.beta;
      for (int i = 0; i < ctx.n(); ++i) head.gamma[i] = m.gamma[i];
      Elem prefix;
      prefix.add_term(head, fac);
      // Frontier across the x-block: slot -> accumulated left coefficient.
      std::map<int, Elem> state;
      state.emplace(k, std::move(prefix));
      for (int j : ctx.alphabet()) {
        int e = m.xpow[alg_->pos(j)];
        if (e == 0) continue;
        int sigma = e > 0 ? 1 : -1;
        for (int rep = 0; rep < (e > 0 ? e : -e); ++rep) {
          std::map<int, Elem> next;
          for (const auto& [slot, pre] : state) {
            if (sigma > 0) {
              for (const auto& [key, v] : transport_.entries()) {
                if (key[0] != slot || key[1] != j) continue;
                auto [it, ins] = next.try_emplace(key[3]);
                it->second.add_all(alg_->scale(alg_->mul(pre, alg_->x(key[2])), v));
              }
            } else {
              const auto& solved = inverse_transport_.at(j)[slot_position(slot)];
              for (const auto& [slot2, coef] : solved.coeffs) {
                auto [it, ins] = next.try_emplace(slot2);
                it->second.add_all(alg_->mul(pre, coef));
              }
            }
          }
          state.clear();
          for (auto& [slot, pre] : next)
            if (!pre.structurally_zero()) state.emplace(slot, std::move(pre));
        }
      }
      for (const auto& [slot, pre] : state) out.add_term(slot, pre);
    }
    return out;
  }

  // --- exterior derivative ----------------------------------------------------

  OneForm<F> d(const Elem& f) const {
    const auto& ctx = alg_->ctx();
    OneForm<F> out;
    for (const auto& [m, c] : f.terms) {
      for (int i = 0; i < ctx.n(); ++i)
        if (m.gamma[i] != 0) throw UnsupportedInput("d is not defined on r-generators");
      // d(Lambda^a K^b u) = q^{-a} Lambda^a K^b d(u); dLambda = dK = 0.
      Mono head = alg_->blank();
      head.alpha = m.alpha;
      head.beta = m.beta;
      Elem prefix;
      prefix.add_term(head, c * ctx.q_power(-m.alpha));
      std::vector<std::pair<int, int>> word;  // (index, +-1)
      for (int j : ctx.alphabet()) {
        int e = m.xpow[alg_->pos(j)];
        int sigma = e > 0 ? 1 : -1;
        for (int rep = 0; rep < (e > 0 ? e : -e); ++rep) word.emplace_back(j, sigma);
      }
      std::vector<Elem> suffix(word.size() + 1);
      suffix[word.size()] = alg_->one();
      for (int t = static_cast<int>(word.size()) - 1; t >= 0; --t)
        suffix[t] = alg_->mul(alg_->x(word[t].first, word[t].second), suffix[t + 1]);
      Elem left = prefix;
      for (std::size_t t = 0; t < word.size(); ++t) {
        auto [j, sigma] = word[t];
        OneForm<F> dg = sigma > 0 ? basis(j) : d_of_inverse_.at(j);
        out = add(out, mul_right(mul_left(left, dg), suffix[t + 1]));
        left = alg_->mul(left, alg_->x(j, sigma));
      }
    }
    return out;
  }

  // --- tensor square and wedge -------------------------------------------------

  TensorSquare<F> tensor(const OneForm<F>& u, const OneForm<F>& v) const {
    TensorSquare<F> out;
    for (const auto& [k, cu] : u.coeffs)
      for (const auto& [l, cv] : v.coeffs) {
        OneForm<F> moved = transport(k, cv);
        for (const auto& [i, e] : moved.coeffs) out.add_term({i, l}, alg_->mul(cu, e));
      }
    return out;
  }

  TensorSquare<F> ts_add(TensorSquare<F> a, const TensorSquare<F>& b) const {
    for (const auto& [slot, e] : b.coeffs) a.add_term(slot, e);
    return a;
  }
  TensorSquare<F> ts_sub(TensorSquare<F> a, const TensorSquare<F>& b) const {
    for (const auto& [slot, e] : b.coeffs) a.add_term(slot, alg_->neg(e));
    return a;
  }
  TensorSquare<F> ts_scale(const TensorSquare<F>& a, const F& c) const {
    TensorSquare<F> out;
    for (const auto& [slot, e] : a.coeffs) out.add_term(slot, alg_->scale(e, c));
    return out;
  }
  TensorSquare<F> ts_mul_left(const Elem& f, const TensorSquare<F>& a) const {
    TensorSquare<F> out;
    for (const auto& [slot, e] : a.coeffs) out.add_term(slot, alg_->mul(f, e));
    return out;
  }
  TensorSquare<F> ts_mul_right(const TensorSquare<F>& a, const Elem& f) const {
    TensorSquare<F> out;
    for (const auto& [slot, e] : a.coeffs) {
      OneForm<F> second = transport(slot.second, f);
      for (const auto& [j2, e2] : second.coeffs) {
        OneForm<F> first = transport(slot.first, e2);
        for (const auto& [i2, e3] : first.coeffs)
          out.add_term({i2, j2}, alg_->mul(e, e3));
      }
    }
    return out;
  }
  // Apply an index tensor S (a left-module endomorphism) to the basis pair:
  // xi^i (x) xi^j -> S^{ij}_{kl} xi^k (x) xi^l.
  TensorSquare<F> ts_apply(const SparseTensor4<F>& s, const TensorSquare<F>& a) const {
    TensorSquare<F> out;
    for (const auto& [slot, e] : a.coeffs)
      for (const auto& [key, v] : s.entries()) {
        if (key[0] != slot.first || key[1] != slot.second) continue;
        out.add_term({key[2], key[3]}, alg_->scale(e, v));
      }
    return out;
  }
  bool ts_is_zero(const TensorSquare<F>& a) const {
    for (const auto& [slot, e] : a.coeffs)
      if (!alg_->is_zero(e)) return false;
    return true;
  }

  // Project the coefficient array of a tensor square onto the wedge quotient:
  // the canonical representative is C * P_a on the form-index pair.
  TwoForm<F> project(const TensorSquare<F>& a) const {
    TwoForm<F> out;
    std::map<std::pair<int, int>, Elem> acc;
    for (const auto& [slot, e] : a.coeffs)
      for (const auto& [key, v] : tensors_->proj_a.entries()) {
        if (key[0] != slot.first || key[1] != slot.second) continue;
        auto [it, ins] = acc.try_emplace({key[2], key[3]});
        it->second.add_all(alg_->scale(e, v));
      }
    for (auto& [slot, e] : acc)
      if (!e.structurally_zero()) out.coeffs.emplace(slot, std::move(e));
    return out;
  }

  TwoForm<F> wedge(const OneForm<F>& u, const OneForm<F>& v) const {
    return project(tensor(u, v));
  }
  TwoForm<F> tf_add(TwoForm<F> a, const TwoForm<F>& b) const {
    for (const auto& [slot, e] : b.coeffs) {
      auto [it, ins] = a.coeffs.try_emplace(slot, e);
      if (!ins) {
        it->second.add_all(e);
        if (it->second.structurally_zero()) a.coeffs.erase(it);
      }
    }
    return a;
  }
  TwoForm<F> tf_scale(const TwoForm<F>& a, const F& c) const {
    TwoForm<F> out;
    if (c.is_zero()) return out;
    for (const auto& [slot, e] : a.coeffs) {
      AlgebraElement<F> scaled;
      scaled.add_all_scaled(e, c);
      out.coeffs.emplace(slot, std::move(scaled));
    }
    return out;
  }
  bool tf_is_zero(const TwoForm<F>& a) const {
    for (const auto& [slot, e] : a.coeffs)
      if (!alg_->is_zero(e)) return false;
    return true;
  }

  // d of a one-form (coefficients in the d-admissible sector): d(c xi) = dc ^ xi.
  TwoForm<F> d_one(const OneForm<F>& u) const {
    TwoForm<F> out;
    for (const auto& [slot, e] : u.coeffs) out = tf_add(out, wedge(d(e), basis(slot)));
    return out;
  }

  // --- Dirac one-form ---------------------------------------------------------

  // theta = omega_n q^{N/2} k^{-1} r_n^{-2} g_{ij} x^i xi^j;
  // thetabar = -omega_n q^{-N/2} k^{-1} r_n^{-2} g_{ij} x^i xibar^j.
  OneForm<F> dirac() const {
    const auto& ctx = alg_->ctx();
    const bool plain = kind_ == CalculusKind::plain;
    F front = ctx.omega(ctx.n()) * ctx.q_half(plain ? ctx.N() : -ctx.N()) * ctx.k().inverse();
    if (!plain) front = -front;
    OneForm<F> out;
    for (int j : ctx.alphabet()) {
      Elem coeff = alg_->scale(alg_->mul(alg_->r(ctx.n(), -2), alg_->x(-j)),
                               front * ctx.metric(-j));
      out.add_term(j, coeff);
    }
    return out;
  }

  // true iff d(f) + [theta, f] = 0 coefficient-wise.
  bool check_d_as_commutator(const Elem& f) const {
    OneForm<F> theta = dirac();
    OneForm<F> resid = add(d(f), sub(mul_right(theta, f), mul_left(f, theta)));
    return is_zero(resid);
  }

 private:
  int k_weight_of_form(int slot) const {
    if (slot == 1) return 1;
    if (slot == -1) return -1;
    return 0;
  }
  int slot_position(int slot) const { return alg_->pos(slot); }

  // Solve xi^k (x^c)^{-1} = sum_j A_j for all k by back-substitution in
  // xi^k = sum_{ij} T^{kc}_{ij} x^i A_j  (multiply the transport rule by the
  // inverse). The diagonal entry T^{kc}_{ck} is a nonzero scalar, and the
  // off-diagonal dependencies form a DAG, so the recursion terminates.
  void solve_inverse_transport(int c) {
    const auto& ctx = alg_->ctx();
    const int count = ctx.N();
    std::vector<OneForm<F>> solved(count);
    std::vector<int> status(count, 0);  // 0 unknown, 1 in progress, 2 done
    Elem cinv = alg_->x(c, -1);
    auto solve = [&](auto&& self, int k) -> const OneForm<F>& {
      int p = slot_position(k);
      if (status[p] == 2) return solved[p];
      if (status[p] == 1) throw Error("inverse transport system is not triangular");
      status[p] = 1;
      F mu = transport_.at({k, c, c, k});
      if (mu.is_zero()) throw Error("inverse transport pivot vanishes");
      OneForm<F> rhs = basis(k);
      for (const auto& [key, v] : transport_.entries()) {
        if (key[0] != k || key[1] != c) continue;
        if (key[2] == c && key[3] == k) continue;
        const OneForm<F>& dep = self(self, key[3]);
        rhs = sub(rhs, scale(mul_left(alg_->x(key[2]), dep), v));
      }
      solved[p] = scale(mul_left(cinv, rhs), mu.inverse());
      status[p] = 2;
      return solved[p];
    };
    for (int k : ctx.alphabet()) solve(solve, k);
    inverse_transport_.emplace(c, std::move(solved));
    // d((x^c)^{-1}) = -(x^c)^{-1} xi^c (x^c)^{-1}.
    d_of_inverse_.emplace(
        c, scale(mul_left(cinv, inverse_transport_.at(c)[slot_position(c)]), -ctx.one()));
  }

  // The diagonal exchange rule with the top radius must agree with the tensor
  // transport of its x-expansion r_n^2 = sum g_kl x^k x^l.
  void verify_radius_rule() const {
    const auto& ctx = alg_->ctx();
    const F fac = ctx.q_power(kind_ == CalculusKind::plain ? -2 : 2);
    for (int k : ctx.alphabet()) {
      OneForm<F> via_tensor = transport(k, alg_->r_squared(ctx.n()));
      OneForm<F> via_rule;
      via_rule.add_term(k, alg_->scale(alg_->r_squared(ctx.n()), fac));
      OneForm<F> resid = sub(via_tensor, via_rule);
      for (const auto& [slot, e] : resid.coeffs)
        if (!alg_->is_zero(e))
          throw Error("radius exchange rule is inconsistent with the braid transport");
    }
  }

  const Algebra<F>* alg_;
  const TensorBundle<F>* tensors_;
  CalculusKind kind_;
  SparseTensor4<F> exchange_;
  SparseTensor4<F> transport_;
  std::map<int, std::vector<OneForm<F>>> inverse_transport_;  // coord -> per-slot solution
  std::map<int, OneForm<F>> d_of_inverse_;
};

}  // namespace qeuclid
