#pragma once

#include <string>

#include "qeuclid/scalar_context.hpp"
#include "qeuclid/sparse_tensor.hpp"

namespace qeuclid {

enum class ProjectorKind { symmetric, antisymmetric, trace };

// Lowered q-metric g_ij = q^(-rho_i) delta_{i,-j}; the raised metric g^{ij}
// has the identical components.
template <class F>
SparseTensor2<F> build_metric(const ScalarContext<F>& ctx) {
  SparseTensor2<F> g;
  for (int i : ctx.alphabet()) g.add({i, -i}, ctx.metric(i));
  return g;
}

// The SO_q(N) braid matrix in the -n..n index alphabet. Entries follow the
// standard B/D-series form: q on the non-zero diagonal, a unit flip away from
// the antidiagonal, q^(-1) on the antidiagonal flip, plus the lambda-triangle
// and the trace-block corrections. Overlapping contributions accumulate.
template <class F>
SparseTensor4<F> build_rhat(const ScalarContext<F>& ctx) {
  SparseTensor4<F> r;
  const F one = ctx.one();
  const F q = ctx.q_power(1);
  const F lambda = ctx.q_power(1) - ctx.q_power(-1);
  for (int i : ctx.alphabet()) {
    if (i != 0) {
      r.add({i, i, i, i}, q);
      r.add({i, -i, -i, i}, ctx.q_power(-1));
    } else {
      r.add({0, 0, 0, 0}, one);
    }
  }
  for (int i : ctx.alphabet())
    for (int j : ctx.alphabet()) {
      if (i != j && i != -j) r.add({i, j, j, i}, one);
      if (i < j) r.add({i, j, i, j}, lambda);
    }
  for (int u : ctx.alphabet())
    for (int v : ctx.alphabet())
      if (u > v) r.add({-u, u, v, -v}, -lambda * ctx.q_half(ctx.rho2(u) - ctx.rho2(v)));
  return r;
}

// Spectral projectors of the braid matrix. The trace projector is the paper's
// closed form kappa^(-1) g^{ij} g_{kl}; the antisymmetric one is the Lagrange
// polynomial in rhat vanishing on the q and q^(1-N) eigenspaces; the symmetric
// one completes the decomposition of the identity.
template <class F>
SparseTensor4<F> projector(const ScalarContext<F>& ctx, ProjectorKind kind,
                           const SparseTensor4<F>& rhat) {
  const F q = ctx.q_power(1);
  const F qinv = ctx.q_power(-1);
  const F qtr = ctx.q_half(2 * (1 - ctx.N()));  // q^(1-N)
  switch (kind) {
    case ProjectorKind::trace: {
      SparseTensor4<F> pt;
      const F kappa_inv = ctx.kappa().inverse();
      for (int i : ctx.alphabet())
        for (int k : ctx.alphabet())
          pt.add({i, -i, k, -k}, ctx.metric(i) * ctx.metric(k) * kappa_inv);
      return pt;
    }
    case ProjectorKind::antisymmetric: {
      auto id = SparseTensor4<F>::identity(ctx.alphabet(), ctx.one());
      auto m1 = rhat - id.scaled(q);
      auto m2 = rhat - id.scaled(qtr);
      const F denom = (-qinv - q) * (-qinv - qtr);
      return compose(m1, m2).scaled(denom.inverse());
    }
    case ProjectorKind::symmetric: {
      auto id = SparseTensor4<F>::identity(ctx.alphabet(), ctx.one());
      return id - projector(ctx, ProjectorKind::antisymmetric, rhat) -
             projector(ctx, ProjectorKind::trace, rhat);
    }
  }
  throw ConfigError("unknown projector kind");
}

// rhat^(-1) via the exact identity rhat^(-1) = rhat - lambda + lambda*kappa*P_t
// (equivalent to the spectral form q^(-1) P_s - q P_a + q^(N-1) P_t).
template <class F>
SparseTensor4<F> rhat_inverse(const ScalarContext<F>& ctx, const SparseTensor4<F>& rhat,
                              const SparseTensor4<F>& proj_t) {
  const F lambda = ctx.q_power(1) - ctx.q_power(-1);
  auto id = SparseTensor4<F>::identity(ctx.alphabet(), ctx.one());
  return rhat - id.scaled(lambda) + proj_t.scaled(lambda * ctx.kappa());
}

// Everything the rest of the kernel needs from the R-matrix layer.
template <class F>
struct TensorBundle {
  SparseTensor2<F> g_lower, g_upper;
  SparseTensor4<F> rhat, rhat_inv, proj_s, proj_a, proj_t;
};

template <class F>
TensorBundle<F> build_tensors(const ScalarContext<F>& ctx) {
  TensorBundle<F> b;
  b.g_lower = build_metric(ctx);
  b.g_upper = b.g_lower;  // identical components
  b.rhat = build_rhat(ctx);
  b.proj_t = projector(ctx, ProjectorKind::trace, b.rhat);
  b.proj_a = projector(ctx, ProjectorKind::antisymmetric, b.rhat);
  auto id = SparseTensor4<F>::identity(ctx.alphabet(), ctx.one());
  b.proj_s = id - b.proj_a - b.proj_t;
  b.rhat_inv = rhat_inverse(ctx, b.rhat, b.proj_t);
  return b;
}

// Braid relation R12 R23 R12 = R23 R12 R23 on the tensor cube.
template <class F>
bool check_braid(const ScalarContext<F>& ctx, const SparseTensor4<F>& rhat) {
  auto id1 = SparseTensor<F, 1>::identity(ctx.alphabet(), ctx.one());
  auto r12 = kron(rhat, id1);
  auto r23 = kron(id1, rhat);
  return compose(compose(r12, r23), r12) == compose(compose(r23, r12), r23);
}

// One residual witness, rendered deterministically.
template <class F, int Legs>
std::string first_witness(const SparseTensor<F, Legs>& residual) {
  if (residual.is_zero()) return {};
  const auto& [k, v] = *residual.entries().begin();
  std::string out = "residual[";
  for (int p = 0; p < SparseTensor<F, Legs>::Rank; ++p) {
    if (p) out += (p == Legs ? ";" : ",");
    out += std::to_string(k[p]);
  }
  return out + "] = " + v.to_string();
}

// The four gTT variants:
//   g_il R^(+-1) {}^{lh}_{jk} = R^(-+1) {}^{hl}_{ij} g_lk
//   g^{il} R^(+-1) {}_{lh}^{jk} = R^(-+1) {}_{hl}^{ij} g^{lk}
// Free indices are keyed as (i,h | j,k) on both sides.
template <class F>
SparseTensor4<F> gtt_residual(const TensorBundle<F>& b, bool inverse_first, bool raised) {
  const auto& r_a = inverse_first ? b.rhat_inv : b.rhat;
  const auto& r_b = inverse_first ? b.rhat : b.rhat_inv;
  const auto& g = raised ? b.g_upper : b.g_lower;
  SparseTensor4<F> lhs, rhs;
  if (!raised) {
    // lhs(i,h,j,k) = g_{i,-i} R_a^{(-i)h}_{jk}; rhs(i,h,j,k) = R_b^{hl}_{ij} g_{l,k=-l}.
    for (const auto& [key, v] : r_a.entries())
      lhs.add({-key[0], key[1], key[2], key[3]}, g.at({-key[0], key[0]}) * v);
    for (const auto& [key, v] : r_b.entries())
      rhs.add({key[2], key[0], key[3], -key[1]}, v * g.at({key[1], -key[1]}));
  } else {
    // lhs(i,h,j,k) = g^{i,-i} R_a^{jk}_{(-i)h}; rhs(i,h,j,k) = R_b^{ij}_{hl} g^{l=-k,k}.
    for (const auto& [key, v] : r_a.entries())
      lhs.add({-key[2], key[3], key[0], key[1]}, g.at({-key[2], key[2]}) * v);
    for (const auto& [key, v] : r_b.entries())
      rhs.add({key[0], key[2], key[1], -key[3]}, v * g.at({key[3], -key[3]}));
  }
  return lhs - rhs;
}

}  // namespace qeuclid
