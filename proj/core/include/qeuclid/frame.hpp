#pragma once

#include <array>
#include <chrono>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"
#include "qeuclid/report.hpp"
#include "qeuclid/scalar_context.hpp"

namespace qeuclid {

// The frame layer: normalization constants gamma_a, the inner-derivation
// generators lambda_a, the derivation matrices e^i_a = [lambda_a, x^i], the
// frame one-forms theta^a, and the verification of every identity family they
// satisfy (the lambda equation, the RTT/gTT/normalization families, the glue
// relations between the two calculi, and the frame duality/commutation laws).
//
// Scalar bookkeeping: gamma_a is pinned only through the products
// gamma_a gamma_{-a} (and through its square in glue mode). For shells
// |a| >= 2 the resulting gamma_a is a square root that does not lie in the
// scalar field, so each such shell contributes one formal radical generator
// u_|a| with a known field-valued square. Every gamma is represented as
// (field coefficient) * (monomial in the u's), all derived quantities carry
// the gammas factored out (lambda~_a = lambda_a / gamma_a, and so on), and
// each identity is checked sector by sector in the u-monomials. Sector-wise
// vanishing is sound, and it is also necessary: the signs of the radicals are
// free ("fixed only up to a sign"), so an identity that holds for every sign
// choice must vanish on each u-parity sector separately.

enum class GammaMode { theorem2, theorem5 };
enum class SignBranch { positive, negative };

// Exponent-parity vector of a monomial in the shell radicals u_2..u_n.
using RadicalKey = std::vector<int>;

inline std::string radical_sector_label(const RadicalKey& key) {
  std::string out;
  for (std::size_t p = 0; p < key.size(); ++p) {
    if (key[p] == 0) continue;
    if (!out.empty()) out += "*";
    out += "u(" + std::to_string(static_cast<int>(p) + 2) + ")";
  }
  if (out.empty()) return "rational sector";
  return out + " sector";
}

// coeff * u-monomial, with the monomial kept square-free by reduction.
template <class F>
struct RadicalScalar {
  RadicalKey key;
  F coeff;
};

// A sum of (u-monomial) * (algebra element), grouped by sector. An expression
// vanishes in the radical extension iff every sector vanishes.
template <class F>
struct RadicalElement {
  std::map<RadicalKey, AlgebraElement<F>> parts;

  void add(const RadicalKey& key, const F& coeff, const AlgebraElement<F>& e) {
    if (coeff.is_zero()) return;
    parts[key].add_all_scaled(e, coeff);
  }
};

// The normalization constants of one calculus in one mode. Values follow the
// product constraints exactly; the free data is resolved deterministically:
//   - theorem2 mode fixes the free ratio gamma_a / gamma_{-a} = q;
//   - theorem5 (glue) mode fixes the squares and the ratio
//     gamma_{-a} = q gamma_a, with the barred set locked to
//     gammabar_a = -q gamma_a;
//   - the explicit square roots that do lie in the field (the |a| <= 1
//     specials) take the root with positive imaginary (or positive real)
//     part on the positive branch and its negative on the other branch. For
//     the formal shells the branch sign is absorbed into the radical symbol
//     itself, which is why every identity check is branch-covering there.
template <class F>
class GammaAssignment {
 public:
  GammaAssignment(const ScalarContext<F>& ctx, CalculusKind tag, GammaMode mode,
                  SignBranch branch)
      : ctx_(&ctx), tag_(tag), mode_(mode), branch_(branch) {
    if (mode == GammaMode::theorem5 && !ctx.odd())
      throw ConfigError("glue normalization requires odd N");
    const int n = ctx.n();
    key_size_ = n >= 2 ? n - 1 : 0;
    const F one = ctx.one();
    const F q = ctx.q_power(1);
    const F sign = branch == SignBranch::positive ? one : ctx.zero() - one;
    const F h_inv = ctx.h().inverse();
    const F k_inv = ctx.k().inverse();
    const bool barred = tag == CalculusKind::barred;

    if (ctx.odd()) {
      // gamma_0 = -q^{-1/2} h^{-1}; barred value q^{1/2} h^{-1} (= -q gamma_0).
      set_rational(0, barred ? ctx.q_half(1) * h_inv
                             : ctx.zero() - ctx.q_half(-1) * h_inv);
    }
    // The |a| = 1 specials: squares land in the field, so the values do too.
    if (mode == GammaMode::theorem2) {
      F g1;
      if (ctx.odd()) {
        // plain: gamma_1^2 = q * (-q^{-1} h^{-2}) = -h^{-2};
        // barred: gammabar_1^2 = q * (-q h^{-2}) = -q^2 h^{-2}.
        g1 = sign * ctx.imag_unit() * h_inv;
        if (barred) g1 = g1 * q;
      } else {
        // both tags: gamma_1^2 = q k^{-2}, and q^{1/2} lies in the field.
        g1 = sign * ctx.q_half(1) * k_inv;
      }
      set_rational(1, g1);
      set_rational(-1, g1 * ctx.q_power(-1));
    } else {
      // theorem5 (odd N): gamma_1^2 = -q^{-2} h^{-2}, gamma_{-1} = q gamma_1,
      // gammabar_a = -q gamma_a.
      F g1 = sign * ctx.imag_unit() * ctx.q_power(-1) * h_inv;
      F gm1 = q * g1;
      if (barred) {
        g1 = ctx.zero() - q * g1;
        gm1 = ctx.zero() - q * gm1;
      }
      set_rational(1, g1);
      set_rational(-1, gm1);
    }
    // Formal shells |a| >= 2: one radical generator per shell.
    for (int a = 2; a <= n; ++a) {
      const F pair_plain =
          ctx.zero() - ctx.q_power(-1) * k_inv * k_inv * ctx.omega(a) * ctx.omega(a - 1);
      F square, ca, cma;  // u_a^2, coefficients of gamma_{+-a} in units of u_a
      if (mode == GammaMode::theorem2) {
        square = q * pair_plain;  // ratio gamma_a / gamma_{-a} = q
        ca = barred ? q : one;
        cma = barred ? one : ctx.q_power(-1);
      } else {
        square = ctx.q_power(-1) * pair_plain;  // ratio gamma_{-a} = q gamma_a
        ca = barred ? ctx.zero() - q : one;
        cma = barred ? ctx.zero() - q * q : q;
      }
      squares_[a] = square;
      set_radical(a, ca);
      set_radical(-a, cma);
    }
    for (int a : ctx.alphabet())
      if (a >= 0 || !ctx.odd()) {
        const int rep = a == 0 ? 0 : (a > 0 ? a : -a);
        if (pair_products_.count(rep)) continue;
        RadicalScalar<F> p = a == 0 ? reduce(value(0), value(0))
                                    : reduce(value(rep), value(-rep));
        if (!all_zero(p.key)) throw Error("gamma pair product failed to reduce");
        pair_products_[rep] = p.coeff;
      }
  }

  CalculusKind tag() const { return tag_; }
  GammaMode mode() const { return mode_; }
  SignBranch branch() const { return branch_; }
  int key_size() const { return key_size_; }
  RadicalKey empty_key() const { return RadicalKey(key_size_, 0); }

  const RadicalScalar<F>& value(int a) const { return values_.at(a); }
  bool is_rational(int a) const { return all_zero(values_.at(a).key); }
  // u_shell^2 for the formal shells 2..n.
  const std::map<int, F>& radical_squares() const { return squares_; }
  // gamma_a gamma_{-a} (gamma_0^2 for a = 0); always a field value.
  const F& pair_product(int a) const { return pair_products_.at(a < 0 ? -a : a); }

  RadicalScalar<F> reduce(const RadicalScalar<F>& a, const RadicalScalar<F>& b) const {
    RadicalScalar<F> out{empty_key(), a.coeff * b.coeff};
    for (int p = 0; p < key_size_; ++p) {
      int e = a.key[p] + b.key[p];
      if (e >= 2) {
        out.coeff = out.coeff * squares_.at(p + 2);
        e -= 2;
      }
      out.key[p] = e;
    }
    return out;
  }

  RadicalScalar<F> product(int a, int b) const { return reduce(value(a), value(b)); }

 private:
  static bool all_zero(const RadicalKey& k) {
    for (int e : k)
      if (e != 0) return false;
    return true;
  }
  void set_rational(int a, const F& v) { values_[a] = {RadicalKey(key_size_, 0), v}; }
  void set_radical(int a, const F& coeff) {
    RadicalKey key(key_size_, 0);
    key[(a > 0 ? a : -a) - 2] = 1;
    values_[a] = {std::move(key), coeff};
  }

  const ScalarContext<F>* ctx_;
  CalculusKind tag_;
  GammaMode mode_;
  SignBranch branch_;
  int key_size_ = 0;
  std::map<int, RadicalScalar<F>> values_;
  std::map<int, F> squares_;
  std::map<int, F> pair_products_;
};

template <class F>
GammaAssignment<F> build_gammas(const ScalarContext<F>& ctx, CalculusKind tag,
                                GammaMode mode,
                                SignBranch branch = SignBranch::positive) {
  return GammaAssignment<F>(ctx, tag, mode, branch);
}

// The inner-derivation generators with the gamma factored out:
// lambda~_a = lambda_a / gamma_a. For odd N, lambda~_0 = L (x^0)^{-1}; for
// even N, lambda~_{+-1} = L (x^{+-1})^{-1} K^{-+1}; otherwise
// lambda~_a = L r_{|a|}^{-1} r_{|a|-1}^{-1} x^{-a} (with r_0 read as x^0).
// The barred set replaces L by L^{-1} and flips the K exponents.
template <class F>
std::map<int, AlgebraElement<F>> build_lambdas(const Algebra<F>& alg,
                                               const GammaAssignment<F>& gammas) {
  const auto& ctx = alg.ctx();
  const bool barred = gammas.tag() == CalculusKind::barred;
  const int lpow = barred ? -1 : 1;
  std::map<int, AlgebraElement<F>> out;
  for (int a : ctx.alphabet()) {
    const int m = a > 0 ? a : -a;
    if (ctx.odd() && a == 0) {
      out[a] = alg.mul(alg.L(lpow), alg.x(0, -1));
    } else if (!ctx.odd() && m == 1) {
      const int kpow = (a == 1 ? -1 : 1) * (barred ? -1 : 1);
      out[a] = alg.mul(alg.mul(alg.L(lpow), alg.x(a, -1)), alg.K(kpow));
    } else {
      auto inner = m - 1 >= 1 ? alg.r(m - 1, -1) : alg.x(0, -1);
      out[a] = alg.mul(alg.mul(alg.L(lpow), alg.r(m, -1)), alg.mul(inner, alg.x(-a)));
    }
  }
  return out;
}

// Everything the verifiers reuse. All entries are carried rescaled:
//   lambdas[a]          = lambda_a / gamma_a
//   e[{i,a}]            = [lambdas[a], x^i]            (= e^i_a / gamma_a)
//   theta_components[{a,i}] = theta^a_i / gamma_{-a}
//   frame[a]            = theta^a / gamma_{-a}
// and `dirac` is the (unrescaled, field-coefficient) dirac one-form of the
// calculus the frame belongs to.
template <class F>
struct FrameData {
  CalculusKind tag;
  GammaAssignment<F> gammas;
  std::map<int, AlgebraElement<F>> lambdas;
  std::map<std::pair<int, int>, AlgebraElement<F>> e;
  std::map<std::pair<int, int>, AlgebraElement<F>> theta_components;
  std::map<int, OneForm<F>> frame;
  OneForm<F> dirac;
};

// lambdas + e-matrix only; enough for the theorem 1-5 families.
template <class F>
FrameData<F> build_frame_data(const Algebra<F>& alg, GammaAssignment<F> gammas) {
  FrameData<F> fd{gammas.tag(), std::move(gammas), {}, {}, {}, {}, {}};
  fd.lambdas = build_lambdas(alg, fd.gammas);
  const auto& ctx = alg.ctx();
  for (int a : ctx.alphabet())
    for (int i : ctx.alphabet())
      fd.e[{i, a}] = alg.commutator(fd.lambdas.at(a), alg.x(i));
  return fd;
}

// Attaches the frame one-forms: theta^a = L^{-2} g^{ab} [lambda_b, x^j] g_jl xi^l
// for the plain calculus and L^{+2} ... for the barred one. With the
// antidiagonal metric this collapses to
//   theta~^a_l = g^{a,-a} g_{-l,l} L^{-+2} e~^{-l}_{-a}.
template <class F>
FrameData<F> build_frame(const Algebra<F>& alg, const Calculus<F>& calc,
                         FrameData<F> fd) {
  const auto& ctx = alg.ctx();
  const int lpow = fd.tag == CalculusKind::plain ? -2 : 2;
  for (int a : ctx.alphabet()) {
    OneForm<F> w;
    for (int l : ctx.alphabet()) {
      auto comp = alg.scale(alg.mul(alg.L(lpow), fd.e.at({-l, -a})),
                            ctx.metric(a) * ctx.metric(-l));
      fd.theta_components[{a, l}] = comp;
      w = calc.add(w, calc.push_coefficient(l, comp));
    }
    fd.frame[a] = w;
  }
  fd.dirac = calc.dirac();
  return fd;
}

namespace detail {

// Index of tensor entries by the first two legs (upper pair).
template <class F>
std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>>
rows_by_upper(const SparseTensor4<F>& t) {
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>> out;
  for (const auto& [k, v] : t.entries()) out[{k[0], k[1]}].push_back({{k[2], k[3]}, v});
  return out;
}

// Index of tensor entries by the last two legs (lower pair).
template <class F>
std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>>
rows_by_lower(const SparseTensor4<F>& t) {
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>> out;
  for (const auto& [k, v] : t.entries()) out[{k[2], k[3]}].push_back({{k[0], k[1]}, v});
  return out;
}

template <class F>
bool radical_is_zero(const Algebra<F>& alg, const RadicalElement<F>& r,
                     std::string* witness) {
  for (const auto& [key, elem] : r.parts) {
    if (alg.is_zero(elem)) continue;
    if (witness) *witness = radical_sector_label(key) + ": " + alg.to_string(elem);
    return false;
  }
  return true;
}

// Cache of two-factor products of cached matrix entries.
template <class F, class Map>
class PairProductCache {
 public:
  PairProductCache(const Algebra<F>& alg, const Map& entries)
      : alg_(&alg), entries_(&entries) {}
  const AlgebraElement<F>& get(int i1, int a1, int i2, int a2) {
    const std::array<int, 4> key{i1, a1, i2, a2};
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, alg_->mul(entries_->at({i1, a1}), entries_->at({i2, a2})))
               .first;
    return it->second;
  }

 private:
  const Algebra<F>* alg_;
  const Map* entries_;
  std::map<std::array<int, 4>, AlgebraElement<F>> cache_;
};

}  // namespace detail

// The lambda equation: for the plain calculus
//   x^h [lambda_a, x^i] = q Rhat^{hi}_{jk} [lambda_a, x^j] x^k,
// and for the barred calculus the mirror with the inverse braid matrix,
//   x^h [lambda_a, x^i] = q^{-1} Rhat^{-1}{}^{hi}_{jk} [lambda_a, x^j] x^k.
// The barred form is forced by compatibility with the barred exchange rule
// (the commutators [lambda_a, x^i] must braid with coordinates exactly like
// the barred one-form basis does); its flipped equivalent is
//   [lambda_a, x^i] x^j = q Rhat^{ij}_{lk} x^l [lambda_a, x^k].
// The equation is linear in lambda_a, so it is checked on the rescaled
// representatives directly. One report entry per index a.
template <class F>
VerificationReport verify_lambda_equation(const Algebra<F>& alg, const TensorBundle<F>& t,
                                          CalculusKind tag,
                                          const std::map<int, AlgebraElement<F>>& lambdas) {
  const auto& ctx = alg.ctx();
  VerificationReport rep;
  const bool plain = tag == CalculusKind::plain;
  const std::string prefix = std::string(plain ? "thm1" : "thm3") + ".rxlambda.N" +
                             std::to_string(ctx.N()) + "." + tag_name(tag) + ".a";
  const auto rows = detail::rows_by_upper(plain ? t.rhat : t.rhat_inv);
  const F q_factor = plain ? ctx.q_power(1) : ctx.q_power(-1);
  for (const auto& [a, lam] : lambdas) {
    const auto start = std::chrono::steady_clock::now();
    std::map<int, AlgebraElement<F>> comm;
    for (int i : ctx.alphabet()) comm[i] = alg.commutator(lam, alg.x(i));
    bool ok = true;
    std::string wit;
    for (int h : ctx.alphabet()) {
      for (int i : ctx.alphabet()) {
        AlgebraElement<F> residual = alg.mul(alg.x(h), comm.at(i));
        auto it = rows.find({h, i});
        if (it != rows.end())
          for (const auto& [jk, v] : it->second)
            residual.add_all_scaled(alg.mul(comm.at(jk.first), alg.x(jk.second)),
                                    ctx.zero() - q_factor * v);
        if (!alg.is_zero(residual)) {
          ok = false;
          wit = "indices (" + std::to_string(h) + "," + std::to_string(i) +
                "): " + alg.to_string(residual);
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed(prefix + std::to_string(a), ok, wit, start);
  }
  return rep;
}

// The theorem 2 / theorem 4 families for one calculus:
//   (lambdalambda)  P_a^{ab}_{cd} lambda_a lambda_b = 0
//   (ree)           Rhat^{ij}_{kl} e^k_a e^l_b = e^i_c e^j_d Rhat^{cd}_{ab}
//   (gtt)           g^{ab} e^i_a e^j_b = g^{ij} L^{+-2},
//                   g_{ij} e^i_a e^j_b = g_{ab} L^{+-2}
//   (nor)           e^0_0 e^0_0 = L^{+-2} for odd N; for even N the analogous
//                   e^1_1 e^{-1}_{-1} = e^{-1}_{-1} e^1_1 = L^{+-2}
// with L^{+2} for the plain calculus and L^{-2} for the barred one. When the
// gammas come from glue mode the families are re-verified under that
// normalization and reported under the thm5.borel prefix.
template <class F>
VerificationReport verify_theorem2(const Algebra<F>& alg, const TensorBundle<F>& t,
                                   const FrameData<F>& fd) {
  const auto& ctx = alg.ctx();
  const auto& g = fd.gammas;
  VerificationReport rep;
  const bool plain = fd.tag == CalculusKind::plain;
  std::string prefix = plain ? "thm2." : "thm4.";
  if (g.mode() == GammaMode::theorem5)
    prefix = std::string("thm5.borel.") + tag_name(fd.tag) + ".";
  const std::string suffix = ".N" + std::to_string(ctx.N()) + "." + tag_name(fd.tag);
  const int lpow = plain ? 2 : -2;
  detail::PairProductCache<F, std::map<std::pair<int, int>, AlgebraElement<F>>> ee(alg, fd.e);

  {  // (lambdalambda)
    const auto start = std::chrono::steady_clock::now();
    const auto rows = detail::rows_by_lower(t.proj_a);
    bool ok = true;
    std::string wit;
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        auto it = rows.find({a, b});
        if (it == rows.end()) continue;
        RadicalElement<F> res;
        for (const auto& [cd, v] : it->second) {
          auto rs = g.product(cd.first, cd.second);
          res.add(rs.key, rs.coeff * v,
                  alg.mul(fd.lambdas.at(cd.first), fd.lambdas.at(cd.second)));
        }
        if (!detail::radical_is_zero(alg, res, &wit)) {
          ok = false;
          wit = "lower indices (" + std::to_string(a) + "," + std::to_string(b) + "), " + wit;
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed(prefix + "lambdalambda" + suffix, ok, wit, start);
  }

  {  // (ree)
    const auto start = std::chrono::steady_clock::now();
    const auto up = detail::rows_by_upper(t.rhat);
    const auto low = detail::rows_by_lower(t.rhat);
    bool ok = true;
    std::string wit;
    for (int i : ctx.alphabet()) {
      for (int j : ctx.alphabet()) {
        auto itu = up.find({i, j});
        for (int a : ctx.alphabet()) {
          for (int b : ctx.alphabet()) {
            RadicalElement<F> res;
            const auto rab = g.product(a, b);
            if (itu != up.end())
              for (const auto& [kl, v] : itu->second)
                res.add(rab.key, rab.coeff * v, ee.get(kl.first, a, kl.second, b));
            auto itl = low.find({a, b});
            if (itl != low.end())
              for (const auto& [cd, v] : itl->second) {
                const auto rcd = g.product(cd.first, cd.second);
                res.add(rcd.key, ctx.zero() - rcd.coeff * v,
                        ee.get(i, cd.first, j, cd.second));
              }
            if (!detail::radical_is_zero(alg, res, &wit)) {
              ok = false;
              wit = "indices (i,j,a,b)=(" + std::to_string(i) + "," + std::to_string(j) +
                    "," + std::to_string(a) + "," + std::to_string(b) + "), " + wit;
              break;
            }
          }
          if (!ok) break;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    rep.add_timed(prefix + "ree" + suffix, ok, wit, start);
  }

  {  // (gtt) raised: g^{ab} e^i_a e^j_b = g^{ij} L^{+-2}
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int i : ctx.alphabet()) {
      for (int j : ctx.alphabet()) {
        AlgebraElement<F> res;
        for (int a : ctx.alphabet())
          res.add_all_scaled(ee.get(i, a, j, -a), ctx.metric(a) * g.pair_product(a));
        if (j == -i) res.add_all_scaled(alg.L(lpow), ctx.zero() - ctx.metric(i));
        if (!alg.is_zero(res)) {
          ok = false;
          wit = "indices (" + std::to_string(i) + "," + std::to_string(j) +
                "): " + alg.to_string(res);
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed(prefix + "gtt.upper" + suffix, ok, wit, start);
  }

  {  // (gtt) lowered: g_{ij} e^i_a e^j_b = g_{ab} L^{+-2}
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        RadicalElement<F> res;
        const auto rab = g.product(a, b);
        for (int i : ctx.alphabet())
          res.add(rab.key, rab.coeff * ctx.metric(i), ee.get(i, a, -i, b));
        if (b == -a)
          res.add(g.empty_key(), ctx.zero() - ctx.metric(a), alg.L(lpow));
        if (!detail::radical_is_zero(alg, res, &wit)) {
          ok = false;
          wit = "indices (" + std::to_string(a) + "," + std::to_string(b) + "), " + wit;
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed(prefix + "gtt.lower" + suffix, ok, wit, start);
  }

  {  // (nor)
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    std::vector<std::pair<int, int>> diag =
        ctx.odd() ? std::vector<std::pair<int, int>>{{0, 0}}
                  : std::vector<std::pair<int, int>>{{1, -1}, {-1, 1}};
    for (const auto& [u, v] : diag) {
      AlgebraElement<F> res;
      const auto ruv = g.product(u, v);
      res.add_all_scaled(ee.get(u, u, v, v), ruv.coeff);
      res.add_all_scaled(alg.L(lpow), ctx.zero() - ctx.one());
      if (!alg.is_zero(res)) {
        ok = false;
        wit = "diagonal (" + std::to_string(u) + "," + std::to_string(v) +
              "): " + alg.to_string(res);
        break;
      }
    }
    rep.add_timed(prefix + "nor" + suffix, ok, wit, start);
  }
  return rep;
}

// Frame-level identities for one calculus. Expects `fd` enriched by
// build_frame. Families: commutation of theta^a with the coordinates, with L
// and with r_n; duality both ways; the dirac identity theta = -lambda_a
// theta^a; the braid and metric relations of the frame components; the
// vanishing of the P_s and P_t parts of theta wedge theta; (manca) with
// F = K = 0; and the reconstruction d x^i = [lambda_a, x^i] theta^a.
template <class F>
VerificationReport verify_frame(const Algebra<F>& alg, const TensorBundle<F>& t,
                                const Calculus<F>& calc, const FrameData<F>& fd) {
  const auto& ctx = alg.ctx();
  const auto& g = fd.gammas;
  VerificationReport rep;
  const std::string suffix = ".N" + std::to_string(ctx.N()) + "." + tag_name(fd.tag);
  const bool plain = fd.tag == CalculusKind::plain;
  const int lpow_comp = plain ? -2 : 2;  // the L power on the *component* side

  {  // [x^i, theta^a] = 0, [L, theta^a] = 0, [r_n, theta^a] = 0
    for (const auto& [label, f] :
         std::vector<std::pair<std::string, AlgebraElement<F>>>{
             {"xtheta", {}}, {"ltheta", alg.L()}, {"rtheta", alg.r(ctx.n())}}) {
      const auto start = std::chrono::steady_clock::now();
      bool ok = true;
      std::string wit;
      for (int a : ctx.alphabet()) {
        std::vector<AlgebraElement<F>> fs;
        if (label == "xtheta")
          for (int i : ctx.alphabet()) fs.push_back(alg.x(i));
        else
          fs.push_back(f);
        for (const auto& u : fs) {
          auto res = calc.sub(calc.mul_left(u, fd.frame.at(a)),
                              calc.mul_right(fd.frame.at(a), u));
          if (!calc.is_zero(res)) {
            ok = false;
            wit = "a=" + std::to_string(a) + ": " + calc.to_string(res);
            break;
          }
        }
        if (!ok) break;
      }
      rep.add_timed("frame." + label + suffix, ok, wit, start);
    }
  }

  {  // duality e^i_a theta^a_j = delta^i_j
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int i : ctx.alphabet()) {
      for (int j : ctx.alphabet()) {
        AlgebraElement<F> res;
        for (int a : ctx.alphabet())
          res.add_all_scaled(alg.mul(fd.e.at({i, a}), fd.theta_components.at({a, j})),
                             g.pair_product(a));
        if (i == j) res.add_all_scaled(alg.one(), ctx.zero() - ctx.one());
        if (!alg.is_zero(res)) {
          ok = false;
          wit = "indices (" + std::to_string(i) + "," + std::to_string(j) +
                "): " + alg.to_string(res);
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed("frame.duality.et" + suffix, ok, wit, start);
  }

  {  // duality theta^a_i e^i_b = delta^a_b
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        RadicalElement<F> res;
        const auto rs = g.product(-a, b);
        for (int i : ctx.alphabet())
          res.add(rs.key, rs.coeff,
                  alg.mul(fd.theta_components.at({a, i}), fd.e.at({i, b})));
        if (a == b) res.add(g.empty_key(), ctx.zero() - ctx.one(), alg.one());
        if (!detail::radical_is_zero(alg, res, &wit)) {
          ok = false;
          wit = "indices (" + std::to_string(a) + "," + std::to_string(b) + "), " + wit;
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed("frame.duality.te" + suffix, ok, wit, start);
  }

  {  // dirac: theta = -lambda_a theta^a
    const auto start = std::chrono::steady_clock::now();
    OneForm<F> acc = fd.dirac;
    for (int a : ctx.alphabet())
      acc = calc.add(acc, calc.scale(calc.mul_left(fd.lambdas.at(a), fd.frame.at(a)),
                                     g.pair_product(a)));
    const bool ok = calc.is_zero(acc);
    rep.add_timed("frame.dirac" + suffix, ok, ok ? "" : calc.to_string(acc), start);
  }

  detail::PairProductCache<F, std::map<std::pair<int, int>, AlgebraElement<F>>> tt(
      alg, fd.theta_components);

  {  // Rhat^{ab}_{cd} theta^d_j theta^c_i = theta^b_l theta^a_k Rhat^{kl}_{ij}
    const auto start = std::chrono::steady_clock::now();
    const auto up = detail::rows_by_upper(t.rhat);
    const auto low = detail::rows_by_lower(t.rhat);
    bool ok = true;
    std::string wit;
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        auto itu = up.find({a, b});
        for (int i : ctx.alphabet()) {
          for (int j : ctx.alphabet()) {
            RadicalElement<F> res;
            if (itu != up.end())
              for (const auto& [cd, v] : itu->second) {
                const auto rs = g.product(-cd.second, -cd.first);
                res.add(rs.key, rs.coeff * v, tt.get(cd.second, j, cd.first, i));
              }
            auto itl = low.find({i, j});
            if (itl != low.end()) {
              const auto rs = g.product(-b, -a);
              for (const auto& [kl, v] : itl->second)
                res.add(rs.key, ctx.zero() - rs.coeff * v, tt.get(b, kl.second, a, kl.first));
            }
            if (!detail::radical_is_zero(alg, res, &wit)) {
              ok = false;
              wit = "indices (a,b,i,j)=(" + std::to_string(a) + "," + std::to_string(b) +
                    "," + std::to_string(i) + "," + std::to_string(j) + "), " + wit;
              break;
            }
          }
          if (!ok) break;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    rep.add_timed("frame.rtt" + suffix, ok, wit, start);
  }

  {  // g_{ab} theta^b_j theta^a_i = L^{-+2} g^{ij}
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int i : ctx.alphabet()) {
      for (int j : ctx.alphabet()) {
        AlgebraElement<F> res;
        for (int a : ctx.alphabet())
          res.add_all_scaled(tt.get(-a, j, a, i), ctx.metric(a) * g.pair_product(a));
        if (j == -i) res.add_all_scaled(alg.L(lpow_comp), ctx.zero() - ctx.metric(i));
        if (!alg.is_zero(res)) {
          ok = false;
          wit = "indices (" + std::to_string(i) + "," + std::to_string(j) +
                "): " + alg.to_string(res);
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed("frame.gtt.lower" + suffix, ok, wit, start);
  }

  {  // g^{ij} theta^b_j theta^a_i = L^{-+2} g_{ab}
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        RadicalElement<F> res;
        const auto rs = g.product(-b, -a);
        for (int i : ctx.alphabet())
          res.add(rs.key, rs.coeff * ctx.metric(i), tt.get(b, -i, a, i));
        if (b == -a)
          res.add(g.empty_key(), ctx.zero() - ctx.metric(a), alg.L(lpow_comp));
        if (!detail::radical_is_zero(alg, res, &wit)) {
          ok = false;
          wit = "indices (" + std::to_string(a) + "," + std::to_string(b) + "), " + wit;
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed("frame.gtt.upper" + suffix, ok, wit, start);
  }

  // P_s and P_t components of theta^c theta^d vanish. Evaluating the wedge
  // directly in the one-form basis requires transporting frame coefficients
  // (which involve inverse radii r_i with i < n once two shells exist) past
  // the basis forms, and that move is outside the supported exchange rules.
  // The direct check therefore runs only for the one-shell case n = 1; for
  // larger N the identity is already implied by the component-level braid and
  // metric relations verified above.
  if (ctx.n() == 1) {
    std::map<std::pair<int, int>, TwoForm<F>> wedges;
    for (int c : ctx.alphabet())
      for (int d : ctx.alphabet())
        wedges[{c, d}] = calc.wedge(fd.frame.at(c), fd.frame.at(d));
    for (const auto& [label, proj] :
         std::vector<std::pair<std::string, const SparseTensor4<F>*>>{
             {"wedge.ps", &t.proj_s}, {"wedge.pt", &t.proj_t}}) {
      const auto start = std::chrono::steady_clock::now();
      const auto rows = detail::rows_by_upper(*proj);
      bool ok = true;
      std::string wit;
      for (int a : ctx.alphabet()) {
        for (int b : ctx.alphabet()) {
          auto it = rows.find({a, b});
          if (it == rows.end()) continue;
          std::map<RadicalKey, TwoForm<F>> acc;
          for (const auto& [cd, v] : it->second) {
            const auto rs = g.product(-cd.first, -cd.second);
            acc[rs.key] = calc.tf_add(acc[rs.key],
                                      calc.tf_scale(wedges.at(cd), rs.coeff * v));
          }
          for (const auto& [key, tf] : acc) {
            if (calc.tf_is_zero(tf)) continue;
            ok = false;
            wit = "upper indices (" + std::to_string(a) + "," + std::to_string(b) +
                  "), " + radical_sector_label(key);
            break;
          }
          if (!ok) break;
        }
        if (!ok) break;
      }
      rep.add_timed("frame." + label + suffix, ok, wit, start);
    }
  }

  {  // (manca) with F = K = 0: 2 lambda_c lambda_d P_a^{cd}_{ab} = 0
    const auto start = std::chrono::steady_clock::now();
    const auto rows = detail::rows_by_lower(t.proj_a);
    bool ok = true;
    std::string wit;
    const F two = ctx.integer(2);
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        auto it = rows.find({a, b});
        if (it == rows.end()) continue;
        RadicalElement<F> res;
        for (const auto& [cd, v] : it->second) {
          const auto rs = g.product(cd.first, cd.second);
          res.add(rs.key, two * rs.coeff * v,
                  alg.mul(fd.lambdas.at(cd.first), fd.lambdas.at(cd.second)));
        }
        if (!detail::radical_is_zero(alg, res, &wit)) {
          ok = false;
          wit = "lower indices (" + std::to_string(a) + "," + std::to_string(b) + "), " + wit;
          break;
        }
      }
      if (!ok) break;
    }
    rep.add_timed("frame.manca" + suffix, ok, wit, start);
  }

  {  // reconstruction d x^i = [lambda_a, x^i] theta^a
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int i : ctx.alphabet()) {
      OneForm<F> acc = calc.scale(calc.d(alg.x(i)), ctx.zero() - ctx.one());
      for (int a : ctx.alphabet())
        acc = calc.add(acc, calc.scale(calc.mul_left(fd.e.at({i, a}), fd.frame.at(a)),
                                       g.pair_product(a)));
      if (!calc.is_zero(acc)) {
        ok = false;
        wit = "i=" + std::to_string(i) + ": " + calc.to_string(acc);
        break;
      }
    }
    rep.add_timed("frame.df" + suffix, ok, wit, start);
  }
  return rep;
}

// The glue layer (theorem 5). For even N the mode is unsatisfiable and the
// report carries the computed obstruction: gluing forces
// gammabar_1 gammabar_{-1} = q^2 gamma_1 gamma_{-1} = q^2 k^{-2}, while the
// barred normalization demands k^{-2}. For odd N it builds both calculi in
// glue mode, re-verifies the Borel families under that normalization, and
// checks the cross relations
//   e^i_i ebar^i_i = 1 (no sum),
//   Rhat^{cd}_{ab} ebar^i_c e^j_d = Rhat^{ij}_{kl} e^k_a ebar^l_b.
template <class F>
VerificationReport verify_glue(const Algebra<F>& alg, const TensorBundle<F>& t,
                               SignBranch branch = SignBranch::positive) {
  const auto& ctx = alg.ctx();
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  if (!ctx.odd()) {
    const auto start = std::chrono::steady_clock::now();
    const F k_sq_inv = (ctx.k() * ctx.k()).inverse();
    const F forced = ctx.q_power(2) * k_sq_inv;
    const F residual = forced - k_sq_inv;
    rep.add_timed(
        "thm5.obstruction.N" + nstr, residual.is_zero(),
        "gluing forces gammabar(1)*gammabar(-1) = q^2*k^-2 while the barred "
        "normalization requires k^-2; difference = " +
            residual.to_string(),
        start);
    return rep;
  }

  auto gp = build_gammas(ctx, CalculusKind::plain, GammaMode::theorem5, branch);
  auto gb = build_gammas(ctx, CalculusKind::barred, GammaMode::theorem5, branch);

  {  // normalization consistency: gammabar_a = -q gamma_a, shared radicals,
     // and the pair products demanded by the separate theorems.
    const auto start = std::chrono::steady_clock::now();
    bool ok = gp.radical_squares() == gb.radical_squares();
    std::string wit = ok ? "" : "radical square tables differ between the calculi";
    const F mq = ctx.zero() - ctx.q_power(1);
    for (int a : ctx.alphabet()) {
      if (!ok) break;
      const auto& vp = gp.value(a);
      const auto& vb = gb.value(a);
      if (vb.key != vp.key || !(vb.coeff - mq * vp.coeff).is_zero()) {
        ok = false;
        wit = "gammabar(" + std::to_string(a) + ") != -q*gamma(" + std::to_string(a) + ")";
      }
    }
    for (int a = 1; a <= ctx.n() && ok; ++a) {
      const F pair = a == 1 ? ctx.zero() - ctx.q_power(-1) * (ctx.h() * ctx.h()).inverse()
                            : ctx.zero() - ctx.q_power(-1) * (ctx.k() * ctx.k()).inverse() *
                                  ctx.omega(a) * ctx.omega(a - 1);
      if (!(gp.pair_product(a) - pair).is_zero() ||
          !(gb.pair_product(a) - ctx.q_power(2) * pair).is_zero()) {
        ok = false;
        wit = "pair product mismatch at |a| = " + std::to_string(a);
      }
    }
    rep.add_timed("thm5.gamma.consistency.N" + nstr, ok, wit, start);
  }

  auto fp = build_frame_data(alg, gp);
  auto fb = build_frame_data(alg, gb);
  rep.merge(verify_theorem2(alg, t, fp));
  rep.merge(verify_theorem2(alg, t, fb));

  {  // diagonal glue: e^i_i ebar^i_i = 1
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string wit;
    for (int i : ctx.alphabet()) {
      const auto rs = gp.reduce(gp.value(i), gb.value(i));
      AlgebraElement<F> res;
      res.add_all_scaled(alg.mul(fp.e.at({i, i}), fb.e.at({i, i})), rs.coeff);
      res.add_all_scaled(alg.one(), ctx.zero() - ctx.one());
      bool rational = true;
      for (int e : rs.key) rational = rational && e == 0;
      if (!rational || !alg.is_zero(res)) {
        ok = false;
        wit = "i=" + std::to_string(i) + ": " + alg.to_string(res);
        break;
      }
    }
    rep.add_timed("thm5.equiv.diag.N" + nstr, ok, wit, start);
  }

  {  // cross RTT: Rhat^{cd}_{ab} ebar^i_c e^j_d = Rhat^{ij}_{kl} e^k_a ebar^l_b
    const auto start = std::chrono::steady_clock::now();
    const auto up = detail::rows_by_upper(t.rhat);
    const auto low = detail::rows_by_lower(t.rhat);
    bool ok = true;
    std::string wit;
    std::map<std::array<int, 4>, AlgebraElement<F>> cache_be, cache_eb;
    auto mixed = [&](std::map<std::array<int, 4>, AlgebraElement<F>>& cache,
                     const FrameData<F>& first, const FrameData<F>& second, int i1, int a1,
                     int i2, int a2) -> const AlgebraElement<F>& {
      const std::array<int, 4> key{i1, a1, i2, a2};
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(key, alg.mul(first.e.at({i1, a1}), second.e.at({i2, a2}))).first;
      return it->second;
    };
    for (int a : ctx.alphabet()) {
      for (int b : ctx.alphabet()) {
        auto itl = low.find({a, b});
        for (int i : ctx.alphabet()) {
          for (int j : ctx.alphabet()) {
            RadicalElement<F> res;
            if (itl != low.end())
              for (const auto& [cd, v] : itl->second) {
                const auto rs = gp.reduce(gb.value(cd.first), gp.value(cd.second));
                res.add(rs.key, rs.coeff * v, mixed(cache_be, fb, fp, i, cd.first, j, cd.second));
              }
            auto itu = up.find({i, j});
            if (itu != up.end()) {
              const auto rs = gp.reduce(gp.value(a), gb.value(b));
              for (const auto& [kl, v] : itu->second)
                res.add(rs.key, ctx.zero() - rs.coeff * v,
                        mixed(cache_eb, fp, fb, kl.first, a, kl.second, b));
            }
            if (!detail::radical_is_zero(alg, res, &wit)) {
              ok = false;
              wit = "indices (a,b,i,j)=(" + std::to_string(a) + "," + std::to_string(b) +
                    "," + std::to_string(i) + "," + std::to_string(j) + "), " + wit;
              break;
            }
          }
          if (!ok) break;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    rep.add_timed("thm5.equiv.rtt.N" + nstr, ok, wit, start);
  }
  return rep;
}

}  // namespace qeuclid
