#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"
#include "qeuclid/frame.hpp"
#include "qeuclid/geometry.hpp"
#include "qeuclid/linalg.hpp"
#include "qeuclid/report.hpp"
#include "qeuclid/sampling.hpp"
#include "qeuclid/scalar_context.hpp"

namespace qeuclid {

enum class RunMode { exact, sampled };

inline const char* mode_name(RunMode m) { return m == RunMode::exact ? "exact" : "sampled"; }

// Everything a verification run depends on. Empty `families` means "all"; the
// execution order is always the canonical one (rmatrix, space, calculus,
// theorem, frame, geometry) regardless of how the selection is spelled.
struct RunConfig {
  int N = 3;
  std::vector<std::string> families;  // empty = all
  std::vector<int> theorems = {1, 2, 3, 4, 5};
  std::vector<CalculusKind> tags = {CalculusKind::plain, CalculusKind::barred};
  std::vector<SigmaBranch> branches = {SigmaBranch::plus, SigmaBranch::minus};
  RunMode mode = RunMode::exact;
  std::uint64_t seed = 20260815;
  int samples = 3;
  KConvention k_convention = KConvention::standard;
  SignBranch gamma_branch = SignBranch::positive;
  bool timings = false;
  int threads = 0;  // 0 = auto; QEUCLID_THREADS caps either way
};

struct FamilyReport {
  std::string family;
  VerificationReport report;
};

struct PointRun {
  std::string point;
  std::vector<FamilyReport> families;
};

struct RunResult {
  std::vector<PointRun> points;

  bool all_pass() const {
    for (const auto& pt : points)
      for (const auto& fr : pt.families)
        if (!fr.report.all_pass()) return false;
    return true;
  }
};

inline int exit_code(const RunResult& rr) { return rr.all_pass() ? 0 : 1; }

inline const std::vector<std::string>& known_families() {
  static const std::vector<std::string> fams = {"rmatrix", "space",  "calculus",
                                                "theorem", "frame",  "geometry"};
  return fams;
}

inline void validate_config(const RunConfig& cfg) {
  if (cfg.N < 3) throw ConfigError("N must be at least 3");
  const auto& known = known_families();
  for (const auto& f : cfg.families)
    if (std::find(known.begin(), known.end(), f) == known.end())
      throw ConfigError("unknown check family '" + f + "'");
  for (int t : cfg.theorems)
    if (t < 1 || t > 5)
      throw ConfigError("theorem selector must be in 1..5, got " + std::to_string(t));
  if (cfg.theorems.empty()) throw ConfigError("theorem selection is empty");
  if (cfg.tags.empty()) throw ConfigError("calculus selection is empty");
  if (cfg.branches.empty()) throw ConfigError("flip-branch selection is empty");
  if (cfg.mode == RunMode::sampled && cfg.samples < 1)
    throw ConfigError("sampled mode needs at least one sample point");
}

// Worker count: the explicit request (0 = hardware auto) capped by the
// QEUCLID_THREADS environment variable, never below 1.
// QEUCLID_THREADS supplies the worker count when none was requested and caps
// an explicit request otherwise.
inline int resolve_threads(int requested) {
  long env_value = 0;
  if (const char* env = std::getenv("QEUCLID_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) env_value = v;
  }
  int value = requested;
  if (value <= 0) {
    if (env_value > 0) {
      value = static_cast<int>(env_value);
    } else {
      const unsigned hw = std::thread::hardware_concurrency();
      value = hw > 0 ? static_cast<int>(hw) : 1;
    }
  } else if (env_value > 0 && env_value < value) {
    value = static_cast<int>(env_value);
  }
  return value < 1 ? 1 : value;
}

namespace rundetail {

inline std::chrono::steady_clock::time_point now() { return std::chrono::steady_clock::now(); }

template <class T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Random normal monomial with small exponents; negative powers only where the
// algebra admits them.
template <class F>
AlgebraElement<F> random_monomial(const Algebra<F>& alg, std::mt19937_64& rng, bool allow_r) {
  const auto& ctx = alg.ctx();
  std::uniform_int_distribution<int> small(-2, 2);
  std::uniform_int_distribution<int> nonneg(0, 2);
  Mono m = alg.blank();
  m.alpha = small(rng);
  if (!ctx.odd()) m.beta = small(rng);
  if (allow_r)
    for (int i = 1; i <= ctx.n(); ++i) m.gamma[i - 1] = small(rng);
  for (int i : ctx.alphabet())
    m.xpow[alg.pos(i)] = ctx.is_invertible_coord(i) ? small(rng) : nonneg(rng);
  AlgebraElement<F> e;
  e.add_term(m, ctx.q_half(small(rng)));
  return e;
}

// Coordinate-sector monomial (no L/K/r factors); used for Leibniz and
// transport checks where the derivative acts on the x-sector only.
template <class F>
AlgebraElement<F> random_coordinate_monomial(const Algebra<F>& alg, std::mt19937_64& rng) {
  const auto& ctx = alg.ctx();
  std::uniform_int_distribution<int> small(-2, 2);
  std::uniform_int_distribution<int> nonneg(0, 2);
  Mono m = alg.blank();
  for (int i : ctx.alphabet())
    m.xpow[alg.pos(i)] = ctx.is_invertible_coord(i) ? small(rng) : nonneg(rng);
  AlgebraElement<F> e;
  e.add_term(m, ctx.q_half(small(rng)));
  return e;
}

template <class F>
VerificationReport family_rmatrix(const ScalarContext<F>& ctx) {
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  auto start = now();
  const auto b = build_tensors(ctx);
  const auto id = SparseTensor4<F>::identity(ctx.alphabet(), ctx.one());
  rep.add_timed("rmatrix.symmetry.N" + nstr, b.rhat == b.rhat.transposed(), "", start);

  start = now();
  std::string wit;
  rep.add_timed("rmatrix.braid.N" + nstr, check_braid(ctx, b.rhat), "", start);

  start = now();
  const bool idem = compose(b.proj_s, b.proj_s) == b.proj_s &&
                    compose(b.proj_a, b.proj_a) == b.proj_a &&
                    compose(b.proj_t, b.proj_t) == b.proj_t;
  rep.add_timed("rmatrix.projectors.idempotent.N" + nstr, idem, "", start);

  start = now();
  const bool orth = compose(b.proj_s, b.proj_a).is_zero() &&
                    compose(b.proj_a, b.proj_t).is_zero() &&
                    compose(b.proj_t, b.proj_s).is_zero();
  rep.add_timed("rmatrix.projectors.orthogonal.N" + nstr, orth, "", start);

  start = now();
  rep.add_timed("rmatrix.projectors.complete.N" + nstr, b.proj_s + b.proj_a + b.proj_t == id,
                "", start);

  const F q = ctx.q_power(1);
  start = now();
  const bool spectral = b.proj_s.scaled(q) - b.proj_a.scaled(ctx.q_power(-1)) +
                            b.proj_t.scaled(ctx.q_half(2 * (1 - ctx.N()))) ==
                        b.rhat;
  rep.add_timed("rmatrix.spectral.N" + nstr, spectral, "", start);

  start = now();
  const auto spectral_inv = b.proj_s.scaled(ctx.q_power(-1)) - b.proj_a.scaled(q) +
                            b.proj_t.scaled(ctx.q_half(2 * (ctx.N() - 1)));
  const bool inv = compose(b.rhat, b.rhat_inv) == id && compose(b.rhat_inv, b.rhat) == id &&
                   b.rhat_inv == spectral_inv;
  rep.add_timed("rmatrix.inverse.N" + nstr, inv, "", start);

  for (bool inverse_first : {false, true})
    for (bool raised : {false, true}) {
      start = now();
      const auto residual = gtt_residual(b, inverse_first, raised);
      const std::string id_tag = std::string("rmatrix.gtt.") + (inverse_first ? "inv" : "fwd") +
                                 (raised ? ".upper" : ".lower") + ".N" + nstr;
      rep.add_timed(id_tag, residual.is_zero(),
                    residual.is_zero() ? "" : first_witness(residual), start);
    }

  start = now();
  bool metric_inv = true;
  for (int i : ctx.alphabet())
    metric_inv = metric_inv && b.g_lower.at({i, -i}) * b.g_upper.at({-i, i}) == ctx.one();
  rep.add_timed("rmatrix.metric.inverse.N" + nstr, metric_inv, "", start);

  start = now();
  const auto rank_of = [&](const SparseTensor4<F>& t) {
    if constexpr (std::is_same_v<F, QScalar>)
      return DenseMatrix<GaussRational>::from_tensor4(classical_tensor(t), ctx.alphabet())
          .rank();
    else
      return DenseMatrix<F>::from_tensor4(t, ctx.alphabet()).rank();
  };
  const int N = ctx.N();
  const bool ranks = rank_of(b.proj_s) == N * (N + 1) / 2 - 1 &&
                     rank_of(b.proj_a) == N * (N - 1) / 2 && rank_of(b.proj_t) == 1;
  rep.add_timed("rmatrix.ranks.N" + nstr, ranks, "", start);
  return rep;
}

template <class F>
VerificationReport family_space(const ScalarContext<F>& ctx) {
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  const Algebra<F> alg(ctx);
  const auto bundle = build_tensors(ctx);
  const F q = ctx.q_power(1);

  auto start = now();
  bool ok = true;
  std::string wit;
  for (int i : ctx.alphabet())
    if (!(alg.mul(alg.x(i), alg.L()) == alg.scale(alg.mul(alg.L(), alg.x(i)), q))) {
      ok = false;
      wit = "x(" + std::to_string(i) + ") vs L";
    }
  if (ok && !(alg.mul(alg.r(1), alg.L()) == alg.scale(alg.mul(alg.L(), alg.r(1)), q))) {
    ok = false;
    wit = "r(1) vs L";
  }
  for (int i = 1; ok && i <= ctx.n(); ++i)
    for (int j : ctx.alphabet()) {
      F c = ctx.one();
      if (j < -i) c = q;
      if (j > i) c = ctx.q_power(-1);
      if (!(alg.mul(alg.x(j), alg.r(i)) == alg.scale(alg.mul(alg.r(i), alg.x(j)), c))) {
        ok = false;
        wit = "x(" + std::to_string(j) + ") vs r(" + std::to_string(i) + ")";
        break;
      }
    }
  if (ok && !ctx.odd()) {
    ok = alg.mul(alg.K(), alg.x(1)) == alg.scale(alg.mul(alg.x(1), alg.K()), q) &&
         alg.mul(alg.K(), alg.x(-1)) ==
             alg.scale(alg.mul(alg.x(-1), alg.K()), ctx.q_power(-1)) &&
         alg.commutator(alg.K(), alg.r(1)).structurally_zero();
    for (int j : ctx.alphabet())
      if (j != 1 && j != -1) ok = ok && alg.commutator(alg.K(), alg.x(j)).structurally_zero();
    if (!ok) wit = "K exchange";
  }
  if (ok && ctx.n() >= 2 && !(alg.mul(alg.r(1), alg.r(2)) == alg.mul(alg.r(2), alg.r(1)))) {
    ok = false;
    wit = "r(1) vs r(2)";
  }
  rep.add_timed("space.exchange.N" + nstr, ok, wit, start);

  start = now();
  ok = true;
  wit.clear();
  for (int i : ctx.alphabet()) {
    for (int j : ctx.alphabet()) {
      AlgebraElement<F> rel;
      for (int k : ctx.alphabet())
        for (int l : ctx.alphabet()) {
          const F c = bundle.proj_a.at({i, j, k, l});
          if (!c.is_zero()) rel.add_all_scaled(alg.mul(alg.x(k), alg.x(l)), c);
        }
      if (!alg.is_zero(rel)) {
        ok = false;
        wit = "pair (" + std::to_string(i) + "," + std::to_string(j) + ")";
        break;
      }
    }
    if (!ok) break;
  }
  rep.add_timed("space.relations.antisym.N" + nstr, ok, wit, start);

  start = now();
  {
    const int nn = ctx.n();
    AlgebraElement<F> sym;
    for (int k : ctx.alphabet())
      for (int l : ctx.alphabet()) {
        const F c = bundle.proj_s.at({nn, nn, k, l});
        if (!c.is_zero()) sym.add_all_scaled(alg.mul(alg.x(k), alg.x(l)), c);
      }
    rep.add_timed("space.relations.sym.nonzero.N" + nstr, !alg.is_zero(sym), "", start);
  }

  start = now();
  ok = true;
  wit.clear();
  for (int i = 1; i <= ctx.n(); ++i) {
    const auto diff = alg.sub(alg.r(i, 2), alg.r_squared(i));
    if (diff.structurally_zero() || !alg.is_zero(diff)) {
      ok = false;
      wit = "shell " + std::to_string(i);
      break;
    }
  }
  if (ok) {
    AlgebraElement<F> acc;
    for (int i : ctx.alphabet())
      acc.add_all_scaled(alg.mul(alg.x(i), alg.x(-i)), ctx.metric(i));
    if (!alg.is_zero(alg.sub(alg.r(ctx.n(), 2), acc))) {
      ok = false;
      wit = "top shell vs metric contraction";
    }
  }
  rep.add_timed("space.radius.tower.N" + nstr, ok, wit, start);

  start = now();
  ok = true;
  wit.clear();
  for (int j : ctx.alphabet())
    if (!alg.commutator(alg.x(j), alg.r(ctx.n())).structurally_zero()) {
      ok = false;
      wit = "x(" + std::to_string(j) + ")";
      break;
    }
  rep.add_timed("space.radius.central.N" + nstr, ok, wit, start);

  start = now();
  {
    Mono m = alg.blank();
    m.alpha = -2;
    if (!ctx.odd()) m.beta = 1;
    m.gamma[ctx.n() - 1] = 3;
    for (int i : ctx.alphabet())
      if (ctx.is_invertible_coord(i)) m.xpow[alg.pos(i)] = -2;
    AlgebraElement<F> e;
    e.add_term(m, ctx.q_half(3));
    const auto inv = alg.invert_monomial(e);
    ok = alg.mul(e, inv) == alg.one() && alg.mul(inv, e) == alg.one();
    rep.add_timed("space.inverses.N" + nstr, ok, "", start);
  }

  std::mt19937_64 rng(0x5eed0001u + static_cast<unsigned>(ctx.N()));
  std::vector<AlgebraElement<F>> zeros;
  zeros.push_back(alg.sub(alg.r(1, 2), alg.r_squared(1)));
  zeros.push_back(
      alg.sub(alg.mul(alg.r(1), alg.r(1, 2)), alg.mul(alg.r_squared(1), alg.r(1))));
  if (ctx.n() >= 2) zeros.push_back(alg.sub(alg.r(2, 2), alg.r_squared(2)));

  start = now();
  ok = true;
  wit.clear();
  for (int rep_i = 0; rep_i < 12; ++rep_i) {
    const auto v = random_monomial(alg, rng, true);
    const auto w = random_monomial(alg, rng, true);
    const auto& z = zeros[static_cast<std::size_t>(rep_i) % zeros.size()];
    if (!alg.is_zero(alg.mul(alg.mul(v, z), w))) {
      ok = false;
      wit = "framed zero, repetition " + std::to_string(rep_i);
      break;
    }
  }
  rep.add_timed("space.zerotest.sound.N" + nstr, ok, wit, start);

  start = now();
  ok = true;
  wit.clear();
  for (int rep_i = 0; rep_i < 12; ++rep_i) {
    AlgebraElement<F> u;
    for (int t = 0; t < 3; ++t) u.add_all(random_monomial(alg, rng, false));
    if (u.structurally_zero()) continue;
    if (alg.is_zero(u) || alg.is_zero(alg.mul(alg.r(1), u)) ||
        alg.is_zero(alg.add(u, alg.sub(alg.r(1, 2), alg.r_squared(1))))) {
      ok = false;
      wit = "repetition " + std::to_string(rep_i);
      break;
    }
  }
  rep.add_timed("space.zerotest.complete.N" + nstr, ok, wit, start);

  start = now();
  ok = true;
  wit.clear();
  for (int rep_i = 0; rep_i < 200; ++rep_i) {
    const auto u = random_monomial(alg, rng, true);
    const auto v = random_monomial(alg, rng, true);
    const auto w = random_monomial(alg, rng, true);
    if (!(alg.mul(alg.mul(u, v), w) == alg.mul(u, alg.mul(v, w)))) {
      ok = false;
      wit = "triple " + std::to_string(rep_i);
      break;
    }
  }
  rep.add_timed("space.confluence.N" + nstr, ok, wit, start);
  return rep;
}

template <class F>
VerificationReport family_calculus(const ScalarContext<F>& ctx,
                                   const std::vector<CalculusKind>& tags) {
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  const Algebra<F> alg(ctx);
  const auto tensors = build_tensors(ctx);
  for (CalculusKind tag : tags) {
    const std::string sfx = ".N" + nstr + "." + tag_name(tag);
    try {
      auto start = now();
      const Calculus<F> calc(alg, tensors, tag);  // the ctor verifies the radius rule
      rep.add_timed("calculus.radius.rule" + sfx, true, "", start);

      start = now();
      bool ok = true;
      std::string wit;
      for (int i : ctx.alphabet()) {
        for (int j : ctx.alphabet()) {
          OneForm<F> rhs;
          for (const auto& [key, v] : calc.exchange_tensor().entries()) {
            if (key[0] != i || key[1] != j) continue;
            rhs = calc.add(rhs, calc.scale(calc.transport(key[2], alg.x(key[3])), v));
          }
          if (!(rhs == calc.push_coefficient(j, alg.x(i)))) {
            ok = false;
            wit = "pair (" + std::to_string(i) + "," + std::to_string(j) + ")";
            break;
          }
        }
        if (!ok) break;
      }
      rep.add_timed("calculus.exchange.N" + nstr + "." + tag_name(tag), ok, wit, start);

      start = now();
      ok = true;
      wit.clear();
      const F rfac = ctx.q_power(tag == CalculusKind::plain ? -1 : 1);
      for (int k : ctx.alphabet()) {
        if (!(calc.mul_right(calc.basis(k), alg.L()) ==
              calc.mul_left(alg.L(), calc.basis(k))) ||
            !(calc.mul_right(calc.basis(k), alg.r(ctx.n())) ==
              calc.scale(calc.mul_left(alg.r(ctx.n()), calc.basis(k)), rfac))) {
          ok = false;
          wit = "basis " + std::to_string(k);
          break;
        }
        for (int c : ctx.alphabet())
          if (ctx.is_invertible_coord(c)) {
            const auto round =
                calc.mul_right(calc.mul_right(calc.basis(k), alg.x(c)), alg.x(c, -1));
            const auto round2 =
                calc.mul_right(calc.mul_right(calc.basis(k), alg.x(c, -1)), alg.x(c));
            if (!(round == calc.basis(k)) || !(round2 == calc.basis(k))) {
              ok = false;
              wit = "inverse round trip on basis " + std::to_string(k);
              break;
            }
          }
        if (!ok) break;
      }
      rep.add_timed("calculus.module" + sfx, ok, wit, start);

      std::mt19937_64 rng(0xca1c0000u + static_cast<unsigned>(ctx.N()) +
                          (tag == CalculusKind::barred ? 64u : 0u));
      start = now();
      ok = true;
      wit.clear();
      for (int rep_i = 0; rep_i < 8; ++rep_i) {
        const auto f = random_coordinate_monomial(alg, rng);
        const auto g = random_coordinate_monomial(alg, rng);
        const int k = ctx.alphabet()[static_cast<std::size_t>(rep_i) % ctx.alphabet().size()];
        if (!(calc.mul_right(calc.mul_right(calc.basis(k), f), g) ==
              calc.mul_right(calc.basis(k), alg.mul(f, g)))) {
          ok = false;
          wit = "repetition " + std::to_string(rep_i);
          break;
        }
      }
      rep.add_timed("calculus.transport.mult" + sfx, ok, wit, start);

      start = now();
      ok = true;
      wit.clear();
      for (int i : ctx.alphabet())
        if (!(calc.d(alg.x(i)) == calc.basis(i))) {
          ok = false;
          wit = "d x(" + std::to_string(i) + ")";
        }
      if (ok && !calc.d(alg.one()).coeffs.empty()) {
        ok = false;
        wit = "d 1";
      }
      if (ok) {
        const auto f = random_coordinate_monomial(alg, rng);
        if (!(calc.d(alg.mul(alg.L(), f)) ==
              calc.scale(calc.mul_left(alg.L(), calc.d(f)), ctx.q_power(-1)))) {
          ok = false;
          wit = "scale-generator exchange";
        }
      }
      rep.add_timed("calculus.d.basis" + sfx, ok, wit, start);

      start = now();
      ok = true;
      wit.clear();
      for (int rep_i = 0; rep_i < 6; ++rep_i) {
        const auto f = random_coordinate_monomial(alg, rng);
        const auto g = random_coordinate_monomial(alg, rng);
        const auto lhs = calc.d(alg.mul(f, g));
        const auto rhs = calc.add(calc.mul_right(calc.d(f), g), calc.mul_left(f, calc.d(g)));
        if (!calc.is_zero(calc.sub(lhs, rhs))) {
          ok = false;
          wit = "repetition " + std::to_string(rep_i);
          break;
        }
      }
      rep.add_timed("calculus.leibniz" + sfx, ok, wit, start);

      start = now();
      ok = true;
      wit.clear();
      for (int i : ctx.alphabet())
        if (!calc.check_d_as_commutator(alg.x(i))) {
          ok = false;
          wit = "x(" + std::to_string(i) + ")";
        }
      if (ok && !calc.check_d_as_commutator(alg.one())) {
        ok = false;
        wit = "constant";
      }
      if (ok && ctx.N() == 3) {
        for (int i : ctx.alphabet())
          for (int j : ctx.alphabet())
            if (!calc.check_d_as_commutator(alg.mul(alg.x(i), alg.x(j)))) {
              ok = false;
              wit = "pair (" + std::to_string(i) + "," + std::to_string(j) + ")";
            }
        for (int c : ctx.alphabet())
          if (ctx.is_invertible_coord(c) && !calc.check_d_as_commutator(alg.x(c, -1))) {
            ok = false;
            wit = "inverse coordinate " + std::to_string(c);
          }
      }
      rep.add_timed("calculus.dirac.commutator" + sfx, ok, wit, start);

      start = now();
      {
        const auto w = calc.wedge(calc.basis(ctx.n()), calc.basis(ctx.n()));
        const auto w2 = calc.wedge(calc.basis(1), calc.basis(-1));
        TensorSquare<F> as_ts;
        for (const auto& [slot, e] : w2.coeffs) as_ts.add_term(slot, e);
        const auto reproj = calc.project(as_ts);
        ok = calc.tf_is_zero(w) && !calc.tf_is_zero(w2) && reproj.coeffs == w2.coeffs;
        rep.add_timed("calculus.wedge.projection" + sfx, ok, "", start);
      }
    } catch (const Error& e) {
      rep.add("calculus.exception" + sfx, false, e.what());
    }
  }
  return rep;
}

template <class F>
VerificationReport family_theorem(const ScalarContext<F>& ctx, const RunConfig& cfg) {
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  const Algebra<F> alg(ctx);
  const auto tensors = build_tensors(ctx);
  for (CalculusKind tag : {CalculusKind::plain, CalculusKind::barred}) {
    if (!contains(cfg.tags, tag)) continue;
    const bool plain = tag == CalculusKind::plain;
    const int lambda_thm = plain ? 1 : 3;
    const int pair_thm = plain ? 2 : 4;
    if (!contains(cfg.theorems, lambda_thm) && !contains(cfg.theorems, pair_thm)) continue;
    try {
      const auto fd = build_frame_data(alg, build_gammas(ctx, tag, GammaMode::theorem2));
      if (contains(cfg.theorems, lambda_thm))
        rep.merge(verify_lambda_equation(alg, tensors, tag, fd.lambdas));
      if (contains(cfg.theorems, pair_thm)) rep.merge(verify_theorem2(alg, tensors, fd));
    } catch (const Error& e) {
      rep.add(std::string("thm") + (plain ? "12" : "34") + ".exception.N" + nstr + "." +
                  tag_name(tag),
              false, e.what());
    }
  }
  if (contains(cfg.theorems, 5)) {
    try {
      rep.merge(verify_glue(alg, tensors, cfg.gamma_branch));
    } catch (const Error& e) {
      rep.add("thm5.exception.N" + nstr, false, e.what());
    }
  }
  return rep;
}

template <class F>
VerificationReport family_frame(const ScalarContext<F>& ctx,
                                const std::vector<CalculusKind>& tags) {
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  const Algebra<F> alg(ctx);
  const auto tensors = build_tensors(ctx);
  for (CalculusKind tag : tags) {
    try {
      const Calculus<F> calc(alg, tensors, tag);
      const auto fd = build_frame(
          alg, calc, build_frame_data(alg, build_gammas(ctx, tag, GammaMode::theorem2)));
      rep.merge(verify_frame(alg, tensors, calc, fd));
    } catch (const Error& e) {
      rep.add("frame.exception.N" + nstr + "." + tag_name(tag), false, e.what());
    }
  }
  return rep;
}

template <class F>
VerificationReport family_geometry(const ScalarContext<F>& ctx, const RunConfig& cfg) {
  VerificationReport rep;
  const std::string nstr = std::to_string(ctx.N());
  const Algebra<F> alg(ctx);
  const auto tensors = build_tensors(ctx);
  for (SigmaBranch branch : cfg.branches) {
    const auto start = now();
    const auto s = sigma_tensor(ctx, tensors, branch);
    std::string wit;
    const bool ok = sigma_braid_holds(ctx, s, &wit);
    rep.add_timed("geometry.sigma.braid.N" + nstr + "." + branch_name(branch), ok, wit, start);
  }
  for (CalculusKind tag : cfg.tags) {
    try {
      const Calculus<F> calc(alg, tensors, tag);
      std::optional<FrameData<F>> fd;
      if (ctx.n() == 1 || ctx.odd())
        fd = build_frame(alg, calc,
                         build_frame_data(alg, build_gammas(ctx, tag, GammaMode::theorem2)));
      bool first_branch = true;
      for (SigmaBranch branch : cfg.branches) {
        const Geometry<F> geo(calc, tensors, branch);
        rep.merge(check_torsion_bilinearity(geo));
        rep.merge(check_conformal_compat(ctx, tensors, tag, branch));
        rep.merge(check_cov_deriv(geo));
        if (first_branch) {
          std::vector<AlgebraElement<F>> fs;
          for (int i : ctx.alphabet()) fs.push_back(alg.x(i));
          fs.push_back(alg.mul(alg.x(ctx.n()), alg.x(-ctx.n())));
          rep.merge(check_metric(geo, fs));
        }
        if (ctx.n() == 1) {
          if (first_branch) rep.merge(check_metric_frame(geo, *fd));
          rep.merge(check_sigma_frame_constancy(geo, *fd));
        }
        if (ctx.odd()) rep.merge(check_curvature(alg, tensors, *fd, branch));
        first_branch = false;
      }
      rep.merge(check_conformal_reciprocity(ctx, tensors, tag));
    } catch (const Error& e) {
      rep.add("geometry.exception.N" + nstr + "." + tag_name(tag), false, e.what());
    }
  }
  return rep;
}

template <class F>
PointRun run_point(const ScalarContext<F>& ctx, const RunConfig& cfg,
                   const std::vector<std::string>& fams, const std::string& label) {
  PointRun pt;
  pt.point = label;
  std::vector<std::function<VerificationReport()>> jobs;
  for (const auto& name : fams) {
    if (name == "rmatrix")
      jobs.emplace_back([&ctx] { return family_rmatrix(ctx); });
    else if (name == "space")
      jobs.emplace_back([&ctx] { return family_space(ctx); });
    else if (name == "calculus")
      jobs.emplace_back([&ctx, &cfg] { return family_calculus(ctx, cfg.tags); });
    else if (name == "theorem")
      jobs.emplace_back([&ctx, &cfg] { return family_theorem(ctx, cfg); });
    else if (name == "frame")
      jobs.emplace_back([&ctx, &cfg] { return family_frame(ctx, cfg.tags); });
    else
      jobs.emplace_back([&ctx, &cfg] { return family_geometry(ctx, cfg); });
  }
  const auto guarded = [&fams](const std::function<VerificationReport()>& job,
                               std::size_t index) {
    try {
      return job();
    } catch (const std::exception& e) {
      VerificationReport rep;
      rep.add(fams[index] + ".exception", false, e.what());
      return rep;
    }
  };
  const int workers = resolve_threads(cfg.threads);
  if (workers > 1 && jobs.size() > 1) {
    std::vector<std::future<VerificationReport>> futures;
    futures.reserve(jobs.size());
    for (std::size_t k = 0; k < jobs.size(); ++k)
      futures.push_back(
          std::async(std::launch::async, [&guarded, &jobs, k] { return guarded(jobs[k], k); }));
    for (std::size_t k = 0; k < jobs.size(); ++k)
      pt.families.push_back({fams[k], futures[k].get()});
  } else {
    for (std::size_t k = 0; k < jobs.size(); ++k)
      pt.families.push_back({fams[k], guarded(jobs[k], k)});
  }
  return pt;
}

}  // namespace rundetail

inline RunResult run_verify(const RunConfig& cfg) {
  validate_config(cfg);
  std::vector<std::string> fams;
  for (const auto& name : known_families())
    if (cfg.families.empty() || rundetail::contains(cfg.families, name)) fams.push_back(name);
  RunResult rr;
  if (cfg.mode == RunMode::exact) {
    const auto ctx = make_exact_context(cfg.N, cfg.k_convention);
    rr.points.push_back(rundetail::run_point(ctx, cfg, fams, "exact"));
  } else {
    for (const auto& s : sample_points(cfg.seed, cfg.samples)) {
      const auto ctx = make_sampled_context(cfg.N, s, cfg.k_convention);
      rr.points.push_back(rundetail::run_point(ctx, cfg, fams, s.to_string()));
    }
  }
  return rr;
}

}  // namespace qeuclid
