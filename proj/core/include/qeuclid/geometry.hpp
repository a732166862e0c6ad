#pragma once

#include <array>
#include <chrono>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/frame.hpp"
#include "qeuclid/report.hpp"

namespace qeuclid {

// The two admissible generalized flips for each calculus.
enum class SigmaBranch { plus, minus };

inline const char* branch_name(SigmaBranch b) {
  return b == SigmaBranch::plus ? "plus" : "minus";
}

// S = q Rhat for the plus branch, (q Rhat)^{-1} = q^{-1} Rhat^{-1} for minus.
template <class F>
SparseTensor4<F> sigma_tensor(const ScalarContext<F>& ctx, const TensorBundle<F>& t,
                              SigmaBranch b) {
  return b == SigmaBranch::plus ? t.rhat.scaled(ctx.q_power(1))
                                : t.rhat_inv.scaled(ctx.q_power(-1));
}

// Braid relation s12 s23 s12 = s23 s12 s23 checked on every basis triple.
template <class F>
bool sigma_braid_holds(const ScalarContext<F>& ctx, const SparseTensor4<F>& s,
                       std::string* witness = nullptr) {
  const auto rows = detail::rows_by_upper(s);
  using State = std::map<std::array<int, 3>, F>;
  const auto apply = [&](const State& in, int pos) {
    State out;
    for (const auto& [key, c] : in) {
      const std::pair<int, int> legs =
          pos == 0 ? std::pair<int, int>{key[0], key[1]} : std::pair<int, int>{key[1], key[2]};
      auto it = rows.find(legs);
      if (it == rows.end()) continue;
      for (const auto& [kl, v] : it->second) {
        const std::array<int, 3> nk = pos == 0
                                          ? std::array<int, 3>{kl.first, kl.second, key[2]}
                                          : std::array<int, 3>{key[0], kl.first, kl.second};
        auto [jt, ins] = out.try_emplace(nk, ctx.zero());
        jt->second += c * v;
      }
    }
    return out;
  };
  for (int i : ctx.alphabet())
    for (int j : ctx.alphabet())
      for (int k : ctx.alphabet()) {
        State start;
        start.emplace(std::array<int, 3>{i, j, k}, ctx.one());
        State lhs = apply(apply(apply(start, 0), 1), 0);
        const State rhs = apply(apply(apply(start, 1), 0), 1);
        for (const auto& [key, v] : rhs) {
          auto [it, ins] = lhs.try_emplace(key, ctx.zero());
          it->second = it->second - v;
        }
        for (const auto& [key, v] : lhs) {
          if (v.is_zero()) continue;
          if (witness)
            *witness = "triple (" + std::to_string(i) + "," + std::to_string(j) + "," +
                       std::to_string(k) + "), image (" + std::to_string(key[0]) + "," +
                       std::to_string(key[1]) + "," + std::to_string(key[2]) +
                       "): " + v.to_string();
          return false;
        }
      }
  return true;
}

namespace detail {

inline std::string geo_suffix(int N, CalculusKind tag, SigmaBranch b) {
  return ".N" + std::to_string(N) + "." + tag_name(tag) + "." + branch_name(b);
}

// Render a scalar in powers of q when the field supports it (exact mode);
// fall back to the raw value at a sampled point.
template <class F>
std::string scalar_text(const F& v) {
  if constexpr (requires { v.to_q_string(); })
    return v.to_q_string();
  else
    return v.to_string();
}

// Row map of a tensor re-expressed on the rescaled frame basis. With
// theta~^a = theta^a / gamma_{-a}, constant components T^{ab}_{cd} on the
// unrescaled frame pick up the ratio gamma_{-c} gamma_{-d} / (gamma_{-a}
// gamma_{-b}). Entries of any polynomial in Rhat either preserve the index
// multiset (ratio 1) or map an antidiagonal pair to an antidiagonal pair
// (ratio pair_product(c) / pair_product(a), rational even though the gammas
// themselves are radicals).
template <class F>
std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>>
dressed_rows(const SparseTensor4<F>& t, const std::map<int, F>& pair) {
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>> out;
  for (const auto& [k, v] : t.entries()) {
    const int a = k[0], b = k[1], c = k[2], d = k[3];
    F w = v;
    if (!((c == a && d == b) || (c == b && d == a))) {
      if (b != -a || d != -c)
        throw Error("frame dressing: tensor entry is neither multiset-preserving "
                    "nor antidiagonal");
      w = v * pair.at(c) * pair.at(a).inverse();
    }
    out[{a, b}].push_back({{c, d}, w});
  }
  return out;
}

// C^{(a,d,c,b)} = sum_{e,f,g} S^{ae}_{df} g^{fg} S^{cb}_{eg}.
template <class F>
std::map<std::array<int, 4>, F> conformal_contraction(const ScalarContext<F>& ctx,
                                                      const SparseTensor4<F>& s) {
  std::map<std::array<int, 4>, F> acc;
  for (const auto& [k1, v1] : s.entries()) {
    const int e = k1[1], f = k1[3];
    for (const auto& [k2, v2] : s.entries()) {
      if (k2[2] != e || k2[3] != -f) continue;
      auto [it, ins] = acc.try_emplace({k1[0], k1[2], k2[0], k2[1]}, ctx.zero());
      it->second += v1 * ctx.metric(f) * v2;
    }
  }
  return acc;
}

}  // namespace detail

// The scalar c in S^{ae}_{df} g^{fg} S^{cb}_{eg} = c g^{ac} delta^b_d. `uniform`
// reports whether the contraction has that shape at all; when it does not, the
// returned value is the reference-slot quotient and carries no meaning.
template <class F>
F conformal_factor(const ScalarContext<F>& ctx, const TensorBundle<F>& t, SigmaBranch b,
                   bool* uniform) {
  const auto acc = detail::conformal_contraction(ctx, sigma_tensor(ctx, t, b));
  const int a0 = ctx.alphabet().front();
  F factor = ctx.zero();
  if (auto it = acc.find({a0, a0, -a0, a0}); it != acc.end())
    factor = it->second * ctx.metric(a0).inverse();
  bool ok = !factor.is_zero();
  for (const auto& [key, v] : acc) {
    const F expect = (key[2] == -key[0] && key[3] == key[1]) ? factor * ctx.metric(key[0])
                                                             : ctx.zero();
    if (!(v - expect).is_zero()) {
      ok = false;
      break;
    }
  }
  for (int a : ctx.alphabet())
    for (int b2 : ctx.alphabet())
      if (!acc.count({a, b2, -a, b2})) ok = false;
  if (uniform) *uniform = ok;
  return factor;
}

// Geometry of one calculus under one flip branch: the A-bilinear flip and
// metric maps and the torsion-free covariant derivative
//   D xi = -theta (x) xi + sigma(xi (x) theta).
template <class F>
class Geometry {
 public:
  using Elem = AlgebraElement<F>;

  Geometry(const Calculus<F>& calc, const TensorBundle<F>& tensors, SigmaBranch branch)
      : calc_(&calc),
        tensors_(&tensors),
        branch_(branch),
        sigma_(sigma_tensor(calc.algebra().ctx(), tensors, branch)),
        theta_(calc.dirac()) {
    for (int i : calc.algebra().ctx().alphabet()) d_basis_.emplace(i, compute_d_basis(i));
  }

  const Calculus<F>& calculus() const { return *calc_; }
  const TensorBundle<F>& tensors() const { return *tensors_; }
  SigmaBranch branch() const { return branch_; }
  const SparseTensor4<F>& sigma_matrix() const { return sigma_; }
  const OneForm<F>& dirac() const { return theta_; }

  TensorSquare<F> sigma(const TensorSquare<F>& u) const { return calc_->ts_apply(sigma_, u); }

  // g(sum c_ij xi^i (x) xi^j) = sum c_ij g^{ij} L^2 (plain) or L^{-2} (barred).
  Elem metric_apply(const TensorSquare<F>& u) const {
    const auto& alg = calc_->algebra();
    const Elem lpow = alg.L(calc_->kind() == CalculusKind::plain ? 2 : -2);
    Elem out;
    for (const auto& [slot, e] : u.coeffs) {
      if (slot.second != -slot.first) continue;
      out.add_all(alg.mul(e, alg.scale(lpow, alg.ctx().metric(slot.first))));
    }
    return out;
  }

  const TensorSquare<F>& cov_deriv_basis(int i) const { return d_basis_.at(i); }

  // Left-Leibniz extension to arbitrary one-forms (left-coefficient form):
  // D(sum c_i xi^i) = sum d(c_i) (x) xi^i + c_i D xi^i.
  TensorSquare<F> cov_deriv(const OneForm<F>& u) const {
    TensorSquare<F> out;
    for (const auto& [i, c] : u.coeffs) {
      out = calc_->ts_add(out, calc_->tensor(calc_->d(c), calc_->basis(i)));
      out = calc_->ts_add(out, calc_->ts_mul_left(c, d_basis_.at(i)));
    }
    return out;
  }

 private:
  TensorSquare<F> compute_d_basis(int i) const {
    TensorSquare<F> a = calc_->tensor(theta_, calc_->basis(i));
    TensorSquare<F> b = calc_->tensor(calc_->basis(i), theta_);
    return calc_->ts_sub(sigma(b), a);
  }

  const Calculus<F>* calc_;
  const TensorBundle<F>* tensors_;
  SigmaBranch branch_;
  SparseTensor4<F> sigma_;
  OneForm<F> theta_;
  std::map<int, TensorSquare<F>> d_basis_;
};

// Wedge projection of (S + 1) applied to every basis pair; used both by the
// torsion check and, with S replaced by a non-solution, as a negative control.
template <class F>
bool torsion_projection_vanishes(const Calculus<F>& calc, const SparseTensor4<F>& s,
                                 std::string* witness = nullptr) {
  const auto& ctx = calc.algebra().ctx();
  for (int i : ctx.alphabet())
    for (int j : ctx.alphabet()) {
      const TensorSquare<F> base = calc.tensor(calc.basis(i), calc.basis(j));
      const TwoForm<F> image = calc.project(calc.ts_add(calc.ts_apply(s, base), base));
      if (!calc.tf_is_zero(image)) {
        if (witness)
          *witness = "pair (" + std::to_string(i) + "," + std::to_string(j) + ")";
        return false;
      }
    }
  return true;
}

// (torsion) pi o (sigma + 1) = 0, plus the spectral oracle
//   q Rhat + 1 = (q^2+1) P_s + 0 P_a + (q^{2-N}+1) P_t,
// with inverse eigenvalues q^{-2}+1, q^{N-2}+1 on the minus branch.
template <class F>
VerificationReport check_torsion_bilinearity(const Geometry<F>& geo) {
  const auto& calc = geo.calculus();
  const auto& ctx = calc.algebra().ctx();
  const auto& t = geo.tensors();
  const std::string suffix = detail::geo_suffix(ctx.N(), calc.kind(), geo.branch());
  VerificationReport rep;

  auto start = std::chrono::steady_clock::now();
  std::string wit;
  bool ok = torsion_projection_vanishes(calc, geo.sigma_matrix(), &wit);
  rep.add_timed("geometry.torsion.wedge" + suffix, ok, wit, start);

  start = std::chrono::steady_clock::now();
  const bool plus = geo.branch() == SigmaBranch::plus;
  const F mu_s = (plus ? ctx.q_power(2) : ctx.q_power(-2)) + ctx.one();
  const F mu_t = (plus ? ctx.q_half(2 * (2 - ctx.N())) : ctx.q_half(2 * (ctx.N() - 2))) + ctx.one();
  const auto id = SparseTensor4<F>::identity(ctx.alphabet(), ctx.one());
  const auto residual =
      geo.sigma_matrix() + id - t.proj_s.scaled(mu_s) - t.proj_t.scaled(mu_t);
  rep.add_timed("geometry.torsion.spectral" + suffix, residual.is_zero(),
                first_witness(residual), start);
  return rep;
}

// Conformal metric compatibility: the contraction equals q^{+-2} g^{ac} delta^b_d
// (the exact factor is recorded in the residual field), and the strict equality
// (factor 1) fails except at the degenerate sample q = 1.
template <class F>
VerificationReport check_conformal_compat(const ScalarContext<F>& ctx,
                                          const TensorBundle<F>& t, CalculusKind tag,
                                          SigmaBranch branch) {
  const std::string suffix = detail::geo_suffix(ctx.N(), tag, branch);
  VerificationReport rep;
  auto start = std::chrono::steady_clock::now();
  bool uniform = false;
  const F factor = conformal_factor(ctx, t, branch, &uniform);
  const bool in_range =
      (factor - ctx.q_power(2)).is_zero() || (factor - ctx.q_power(-2)).is_zero();
  rep.add_timed("geometry.compat.conformal" + suffix, uniform && in_range,
                "factor = " + detail::scalar_text(factor), start);

  start = std::chrono::steady_clock::now();
  const bool strict_holds = uniform && (factor - ctx.one()).is_zero();
  const bool q2_trivial = (ctx.q_power(2) - ctx.one()).is_zero();
  rep.add_timed("geometry.compat.strict" + suffix, q2_trivial ? strict_holds : !strict_holds,
                q2_trivial ? "degenerate sample: strict compatibility restored"
                           : "strict equality fails; proportionality only",
                start);
  return rep;
}

// The two branch factors are exact reciprocals.
template <class F>
VerificationReport check_conformal_reciprocity(const ScalarContext<F>& ctx,
                                               const TensorBundle<F>& t, CalculusKind tag) {
  VerificationReport rep;
  const auto start = std::chrono::steady_clock::now();
  bool up = false, um = false;
  const F fp = conformal_factor(ctx, t, SigmaBranch::plus, &up);
  const F fm = conformal_factor(ctx, t, SigmaBranch::minus, &um);
  rep.add_timed("geometry.compat.reciprocal.N" + std::to_string(ctx.N()) + "." + tag_name(tag),
                up && um && (fp * fm - ctx.one()).is_zero(),
                "factors " + detail::scalar_text(fp) + " and " + detail::scalar_text(fm),
                start);
  return rep;
}

// Covariant-derivative properties: both Leibniz rules on coordinate products
// (each side expanded independently) and torsion-freeness pi(D xi^i) = 0.
template <class F>
VerificationReport check_cov_deriv(const Geometry<F>& geo) {
  const auto& calc = geo.calculus();
  const auto& alg = calc.algebra();
  const auto& ctx = alg.ctx();
  const std::string suffix = detail::geo_suffix(ctx.N(), calc.kind(), geo.branch());
  VerificationReport rep;

  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string wit;
  for (int c : ctx.alphabet()) {
    const auto f = alg.x(c);
    for (int c2 : ctx.alphabet())
      for (int j : ctx.alphabet()) {
        const OneForm<F> u = calc.mul_left(alg.x(c2), calc.basis(j));
        const TensorSquare<F> lhs = geo.cov_deriv(calc.mul_left(f, u));
        const TensorSquare<F> rhs = calc.ts_add(
            calc.tensor(calc.d(f), u), calc.ts_mul_left(f, geo.cov_deriv(u)));
        if (!calc.ts_is_zero(calc.ts_sub(lhs, rhs))) {
          ok = false;
          wit = "f = x(" + std::to_string(c) + "), u = x(" + std::to_string(c2) + ") xi(" +
                std::to_string(j) + ")";
          break;
        }
      }
    if (!ok) break;
  }
  rep.add_timed("geometry.covdev.leibniz.left" + suffix, ok, wit, start);

  start = std::chrono::steady_clock::now();
  ok = true;
  wit.clear();
  for (int c : ctx.alphabet()) {
    const auto f = alg.x(c);
    for (int c2 : ctx.alphabet())
      for (int j : ctx.alphabet()) {
        const OneForm<F> u = calc.mul_left(alg.x(c2), calc.basis(j));
        const TensorSquare<F> lhs = geo.cov_deriv(calc.mul_right(u, f));
        const TensorSquare<F> rhs = calc.ts_add(
            geo.sigma(calc.tensor(u, calc.d(f))), calc.ts_mul_right(geo.cov_deriv(u), f));
        if (!calc.ts_is_zero(calc.ts_sub(lhs, rhs))) {
          ok = false;
          wit = "f = x(" + std::to_string(c) + "), u = x(" + std::to_string(c2) + ") xi(" +
                std::to_string(j) + ")";
          break;
        }
      }
    if (!ok) break;
  }
  rep.add_timed("geometry.covdev.leibniz.right" + suffix, ok, wit, start);

  start = std::chrono::steady_clock::now();
  ok = true;
  wit.clear();
  for (int i : ctx.alphabet()) {
    if (calc.tf_is_zero(calc.project(geo.cov_deriv_basis(i)))) continue;
    ok = false;
    wit = "xi(" + std::to_string(i) + ")";
    break;
  }
  rep.add_timed("geometry.covdev.torsionfree" + suffix, ok, wit, start);
  return rep;
}

// Metric bilinearity over left and right coefficient moves, for the given
// test coefficients.
template <class F>
VerificationReport check_metric(const Geometry<F>& geo,
                                const std::vector<AlgebraElement<F>>& fs) {
  const auto& calc = geo.calculus();
  const auto& alg = calc.algebra();
  const auto& ctx = alg.ctx();
  const std::string suffix = ".N" + std::to_string(ctx.N()) + "." + tag_name(calc.kind());
  VerificationReport rep;

  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string wit;
  for (const auto& f : fs) {
    for (int i : ctx.alphabet())
      for (int j : ctx.alphabet()) {
        const auto base = calc.tensor(calc.basis(i), calc.basis(j));
        const auto lhs =
            geo.metric_apply(calc.tensor(calc.mul_left(f, calc.basis(i)), calc.basis(j)));
        const auto rhs = alg.mul(f, geo.metric_apply(base));
        if (!alg.is_zero(alg.sub(lhs, rhs))) {
          ok = false;
          wit = "f = " + alg.to_string(f) + ", pair (" + std::to_string(i) + "," +
                std::to_string(j) + ")";
          break;
        }
      }
    if (!ok) break;
  }
  rep.add_timed("geometry.metric.bilinear.left" + suffix, ok, wit, start);

  start = std::chrono::steady_clock::now();
  ok = true;
  wit.clear();
  for (const auto& f : fs) {
    for (int i : ctx.alphabet())
      for (int j : ctx.alphabet()) {
        const auto base = calc.tensor(calc.basis(i), calc.basis(j));
        const auto lhs =
            geo.metric_apply(calc.tensor(calc.basis(i), calc.mul_right(calc.basis(j), f)));
        const auto rhs = alg.mul(geo.metric_apply(base), f);
        if (!alg.is_zero(alg.sub(lhs, rhs))) {
          ok = false;
          wit = "f = " + alg.to_string(f) + ", pair (" + std::to_string(i) + "," +
                std::to_string(j) + ")";
          break;
        }
      }
    if (!ok) break;
  }
  rep.add_timed("geometry.metric.bilinear.right" + suffix, ok, wit, start);
  return rep;
}

// Frame values of the metric: pair_product(a) * g(theta~^a (x) theta~^b) equals
// g^{ab} = metric(a) delta_{b,-a}, i.e. the unrescaled frame metric is the
// constant matrix g^{ab}. Evaluating the tensor requires transporting frame
// coefficients past basis forms, which restricts this direct check to the
// one-shell case n = 1 (the component-level gTT families cover larger N).
template <class F>
VerificationReport check_metric_frame(const Geometry<F>& geo, const FrameData<F>& fd) {
  const auto& calc = geo.calculus();
  const auto& alg = calc.algebra();
  const auto& ctx = alg.ctx();
  VerificationReport rep;
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string wit;
  for (int a : ctx.alphabet()) {
    for (int b : ctx.alphabet()) {
      const auto val = geo.metric_apply(calc.tensor(fd.frame.at(a), fd.frame.at(b)));
      AlgebraElement<F> residual = alg.scale(val, fd.gammas.pair_product(a));
      if (b == -a) residual.add_all(alg.scale(alg.one(), ctx.zero() - ctx.metric(a)));
      if (!alg.is_zero(residual)) {
        ok = false;
        wit = "pair (" + std::to_string(a) + "," + std::to_string(b) + ")";
        break;
      }
    }
    if (!ok) break;
  }
  rep.add_timed("geometry.metric.frame.N" + std::to_string(ctx.N()) + "." + tag_name(calc.kind()),
                ok, wit, start);
  return rep;
}

// The flip has constant components on the frame basis: sigma(theta~^a (x)
// theta~^b) computed through the coefficient-transport machinery coincides
// with the dressed matrix entries (scalars) applied to frame pairs. Direct
// evaluation of the tensor products restricts this to n = 1.
template <class F>
VerificationReport check_sigma_frame_constancy(const Geometry<F>& geo,
                                               const FrameData<F>& fd) {
  const auto& calc = geo.calculus();
  const auto& ctx = calc.algebra().ctx();
  std::map<int, F> pair;
  for (int a : ctx.alphabet()) pair.emplace(a, fd.gammas.pair_product(a));
  const auto rows = detail::dressed_rows(geo.sigma_matrix(), pair);
  VerificationReport rep;
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string wit;
  for (int a : ctx.alphabet()) {
    for (int b : ctx.alphabet()) {
      const auto lhs = geo.sigma(calc.tensor(fd.frame.at(a), fd.frame.at(b)));
      TensorSquare<F> rhs;
      if (auto it = rows.find({a, b}); it != rows.end())
        for (const auto& [cd, w] : it->second)
          rhs = calc.ts_add(
              rhs, calc.ts_scale(calc.tensor(fd.frame.at(cd.first), fd.frame.at(cd.second)), w));
      if (!calc.ts_is_zero(calc.ts_sub(lhs, rhs))) {
        ok = false;
        wit = "pair (" + std::to_string(a) + "," + std::to_string(b) + ")";
        break;
      }
    }
    if (!ok) break;
  }
  rep.add_timed("geometry.sigma.frame.constancy" +
                    detail::geo_suffix(ctx.N(), calc.kind(), geo.branch()),
                ok, wit, start);
  return rep;
}

// --- curvature in the frame basis -------------------------------------------

template <class F>
using FrameVector = std::map<int, AlgebraElement<F>>;
template <class F>
using FrameSquare = std::map<std::pair<int, int>, AlgebraElement<F>>;
template <class F>
using FrameCube = std::map<std::tuple<int, int, int>, AlgebraElement<F>>;

// Canonical curvature components per frame index a: components[a][(c,d,b)] is
// the coefficient of theta~^c theta~^d (x) theta~^b, with the two-form pair in
// P_a-canonical position (the conventional -1/2 of the component display is
// absorbed into that canonicalization).
template <class F>
struct CurvatureResult {
  std::map<int, FrameCube<F>> components;

  bool all_zero(const Algebra<F>& alg) const {
    for (const auto& [a, cube] : components)
      for (const auto& [slot, e] : cube)
        if (!alg.is_zero(e)) return false;
    return true;
  }
};

// Covariant-derivative engine in the rescaled frame basis. The frame commutes
// with every coefficient that can appear here (coordinates, their adjoined
// inverses, the radii and the dilatator), so coefficients move freely past
// basis legs and no form transport is involved; the d-term uses the
// inner-derivation expansion d f = sum_u P(u) [lambda~_u, f] theta~^u. For
// even N the frame carries a charge under the Cartan generator K and does not
// commute with it, so the bookkeeping is unsound there and the construction
// is refused.
template <class F>
class FrameConnection {
 public:
  using Elem = AlgebraElement<F>;

  FrameConnection(const Algebra<F>& alg, const TensorBundle<F>& tensors,
                  const FrameData<F>& fd, SigmaBranch branch, bool identity_flip = false)
      : alg_(&alg), fd_(&fd) {
    const auto& ctx = alg.ctx();
    if (!ctx.odd())
      throw UnsupportedInput(
          "frame-basis covariant derivative requires odd N: for even N the frame does not "
          "commute with the Cartan generator K");
    if (fd.theta_components.empty())
      throw ConfigError("frame components missing: build the frame before FrameConnection");
    sigma_ = identity_flip ? SparseTensor4<F>::identity(ctx.alphabet(), ctx.one())
                           : sigma_tensor(ctx, tensors, branch);
    for (int a : ctx.alphabet()) pair_.emplace(a, fd.gammas.pair_product(a));
    sigma_rows_ = detail::dressed_rows(sigma_, pair_);
    proj_rows_ = detail::dressed_rows(tensors.proj_a, pair_);
    for (int l : ctx.alphabet()) d_xi_.emplace(l, compute_d_xi(l));
    for (int a : ctx.alphabet()) d_theta_.emplace(a, compute_d_theta(a));
  }

  // d f = sum_u P(u) [lambda~_u, f] theta~^u.
  FrameVector<F> d_frame(const Elem& f) const {
    FrameVector<F> out;
    for (const auto& [u, lam] : fd_->lambdas) {
      Elem e = alg_->scale(alg_->commutator(lam, f), pair_.at(u));
      if (!e.structurally_zero()) out.emplace(u, std::move(e));
    }
    return out;
  }

  const FrameSquare<F>& d_xi(int l) const { return d_xi_.at(l); }
  const FrameSquare<F>& d_theta(int a) const { return d_theta_.at(a); }

  // D_2(sum c theta^a (x) theta^b) = D(c theta^a) (x) theta^b
  //                                  + sigma_12(c theta^a (x) D theta^b).
  FrameCube<F> d2(const FrameSquare<F>& t) const {
    FrameCube<F> out;
    for (const auto& [slot, c] : t) {
      const auto& [a, b] = slot;
      for (const auto& [u, e] : d_frame(c)) cube_add(out, {u, a, b}, e);
      for (const auto& [uv, d] : d_theta_.at(a))
        cube_add(out, {uv.first, uv.second, b}, alg_->mul(c, d));
      for (const auto& [uv, d] : d_theta_.at(b)) {
        auto it = sigma_rows_.find({a, uv.first});
        if (it == sigma_rows_.end()) continue;
        const Elem cd = alg_->mul(c, d);
        for (const auto& [pr, sval] : it->second)
          cube_add(out, {pr.first, pr.second, uv.second}, alg_->scale(cd, sval));
      }
    }
    return out;
  }

  // Wedge the first two legs: contract them with the antisymmetric projector.
  FrameCube<F> pi12(const FrameCube<F>& t) const {
    FrameCube<F> out;
    for (const auto& [slot, e] : t) {
      auto it = proj_rows_.find({std::get<0>(slot), std::get<1>(slot)});
      if (it == proj_rows_.end()) continue;
      for (const auto& [cd, v] : it->second)
        cube_add(out, {cd.first, cd.second, std::get<2>(slot)}, alg_->scale(e, v));
    }
    return out;
  }

  // Curv(theta~^a) = pi12(D_2(D theta~^a)) for every frame index.
  CurvatureResult<F> curvature() const {
    CurvatureResult<F> out;
    for (const auto& [a, dt] : d_theta_) out.components.emplace(a, pi12(d2(dt)));
    return out;
  }

 private:
  static void cube_add(FrameCube<F>& cube, const std::tuple<int, int, int>& slot,
                       const Elem& e) {
    if (e.structurally_zero()) return;
    auto [it, inserted] = cube.try_emplace(slot, e);
    if (!inserted) {
      it->second.add_all(e);
      if (it->second.structurally_zero()) cube.erase(it);
    }
  }
  static void square_add(FrameSquare<F>& sq, const std::pair<int, int>& slot, const Elem& e) {
    if (e.structurally_zero()) return;
    auto [it, inserted] = sq.try_emplace(slot, e);
    if (!inserted) {
      it->second.add_all(e);
      if (it->second.structurally_zero()) sq.erase(it);
    }
  }

  // D xi^l in the frame basis, from theta = -sum_c P(c) lambda~_c theta~^c and
  // xi^l = sum_b P(b) e~^l_b theta~^b:
  //   -theta (x) xi^l       -> +P(c) P(b) lambda~_c e~^l_b   at (c, b)
  //   sigma(xi^l (x) theta) -> -P(b) P(c) e~^l_b lambda~_c S^{bc}_{uv} at (u, v).
  FrameSquare<F> compute_d_xi(int l) const {
    const auto& ctx = alg_->ctx();
    FrameSquare<F> out;
    for (int c : ctx.alphabet())
      for (int b : ctx.alphabet()) {
        square_add(out, {c, b},
                   alg_->scale(alg_->mul(fd_->lambdas.at(c), fd_->e.at({l, b})),
                               pair_.at(c) * pair_.at(b)));
      }
    for (int b : ctx.alphabet())
      for (int c : ctx.alphabet()) {
        auto it = sigma_rows_.find({b, c});
        if (it == sigma_rows_.end()) continue;
        const Elem w = alg_->scale(alg_->mul(fd_->e.at({l, b}), fd_->lambdas.at(c)),
                                   ctx.zero() - pair_.at(b) * pair_.at(c));
        for (const auto& [uv, v] : it->second)
          square_add(out, {uv.first, uv.second}, alg_->scale(w, v));
      }
    return out;
  }

  // D theta~^a = sum_l d(t_l) (x) xi^l + t_l D xi^l for theta~^a = t_l xi^l.
  FrameSquare<F> compute_d_theta(int a) const {
    const auto& ctx = alg_->ctx();
    FrameSquare<F> out;
    for (int l : ctx.alphabet()) {
      const Elem& t_l = fd_->theta_components.at({a, l});
      if (t_l.structurally_zero()) continue;
      for (const auto& [u, c1] : d_frame(t_l))
        for (int b : ctx.alphabet())
          square_add(out, {u, b},
                     alg_->scale(alg_->mul(c1, fd_->e.at({l, b})), pair_.at(b)));
      for (const auto& [slot, e] : d_xi_.at(l)) square_add(out, slot, alg_->mul(t_l, e));
    }
    return out;
  }

  const Algebra<F>* alg_;
  const FrameData<F>* fd_;
  SparseTensor4<F> sigma_;
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>> sigma_rows_;
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, F>>> proj_rows_;
  std::map<int, F> pair_;
  std::map<int, FrameSquare<F>> d_xi_;
  std::map<int, FrameSquare<F>> d_theta_;
};

// Curv(theta~^a) = 0 for every a; one report entry per frame index.
template <class F>
VerificationReport check_curvature(const Algebra<F>& alg, const TensorBundle<F>& tensors,
                                   const FrameData<F>& fd, SigmaBranch branch) {
  const auto& ctx = alg.ctx();
  const std::string suffix = detail::geo_suffix(ctx.N(), fd.tag, branch);
  VerificationReport rep;
  const FrameConnection<F> conn(alg, tensors, fd, branch);
  for (int a : ctx.alphabet()) {
    const auto start = std::chrono::steady_clock::now();
    const FrameCube<F> cube = conn.pi12(conn.d2(conn.d_theta(a)));
    bool ok = true;
    std::string wit;
    for (const auto& [slot, e] : cube) {
      if (alg.is_zero(e)) continue;
      ok = false;
      wit = "component (" + std::to_string(std::get<0>(slot)) + "," +
            std::to_string(std::get<1>(slot)) + "," + std::to_string(std::get<2>(slot)) +
            "): " + alg.to_string(e);
      break;
    }
    rep.add_timed("geometry.curvature" + suffix + ".a" + std::to_string(a), ok, wit, start);
  }
  return rep;
}

}  // namespace qeuclid
