#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/scalar_context.hpp"

using namespace qeuclid;

namespace {

// Random element of the d-admissible sector: no r-generators, no Lambda
// dressing (the Lambda exchange rule deliberately breaks Leibniz), K and
// coordinate inverses allowed.
template <class F>
AlgebraElement<F> random_coordinate_elem(const Algebra<F>& alg, std::mt19937_64& rng) {
  const auto& ctx = alg.ctx();
  std::uniform_int_distribution<int> small(-1, 1);
  std::uniform_int_distribution<int> nonneg(0, 2);
  AlgebraElement<F> out;
  for (int t = 0; t < 2; ++t) {
    Mono m = alg.blank();
    if (!ctx.odd()) m.beta = small(rng);
    for (int i : ctx.alphabet())
      m.xpow[alg.pos(i)] = ctx.is_invertible_coord(i) ? small(rng) : nonneg(rng);
    out.add_term(m, ctx.q_half(small(rng)));
  }
  return out;
}

template <class F>
void run_calculus_checks(const ScalarContext<F>& ctx, CalculusKind kind) {
  Algebra<F> alg(ctx);
  auto tensors = build_tensors(ctx);
  Calculus<F> calc(alg, tensors, kind);  // constructor verifies the radius rule
  const F q = ctx.q_power(1);

  // The exchange relation as a round trip: x^i xi^j equals the exchange-tensor
  // contraction of transported xi^k x^l.
  for (int i : ctx.alphabet())
    for (int j : ctx.alphabet()) {
      OneForm<F> rhs;
      for (const auto& [key, v] : calc.exchange_tensor().entries()) {
        if (key[0] != i || key[1] != j) continue;
        rhs = calc.add(rhs, calc.scale(calc.transport(key[2], alg.x(key[3])), v));
      }
      CHECK(rhs == calc.push_coefficient(j, alg.x(i)));
    }

  // Lambda commutes with the forms; the top radius obeys the diagonal rule.
  const F rfac = ctx.q_power(kind == CalculusKind::plain ? -1 : 1);
  for (int k : ctx.alphabet()) {
    CHECK(calc.mul_right(calc.basis(k), alg.L()) == calc.mul_left(alg.L(), calc.basis(k)));
    CHECK(calc.mul_right(calc.basis(k), alg.r(ctx.n())) ==
          calc.scale(calc.mul_left(alg.r(ctx.n()), calc.basis(k)), rfac));
    for (int c : ctx.alphabet())
      if (ctx.is_invertible_coord(c)) {
        auto round = calc.mul_right(calc.mul_right(calc.basis(k), alg.x(c)), alg.x(c, -1));
        CHECK(round == calc.basis(k));
        auto round2 = calc.mul_right(calc.mul_right(calc.basis(k), alg.x(c, -1)), alg.x(c));
        CHECK(round2 == calc.basis(k));
      }
  }

  // Transport is multiplicative.
  std::mt19937_64 rng(0xca1c0000u + ctx.N() + (kind == CalculusKind::barred ? 64 : 0));
  for (int rep = 0; rep < 8; ++rep) {
    auto f = random_coordinate_elem(alg, rng);
    auto g = random_coordinate_elem(alg, rng);
    int k = ctx.alphabet()[rep % ctx.alphabet().size()];
    CHECK(calc.mul_right(calc.mul_right(calc.basis(k), f), g) ==
          calc.mul_right(calc.basis(k), alg.mul(f, g)));
  }

  // d: generators, constants, the Lambda exchange rule, Leibniz.
  for (int i : ctx.alphabet()) CHECK(calc.d(alg.x(i)) == calc.basis(i));
  CHECK(calc.d(alg.one()).coeffs.empty());
  {
    auto f = random_coordinate_elem(alg, rng);
    CHECK(calc.d(alg.mul(alg.L(), f)) ==
          calc.scale(calc.mul_left(alg.L(), calc.d(f)), ctx.q_power(-1)));
  }
  for (int rep = 0; rep < 6; ++rep) {
    auto f = random_coordinate_elem(alg, rng);
    auto g = random_coordinate_elem(alg, rng);
    auto lhs = calc.d(alg.mul(f, g));
    auto rhs = calc.add(calc.mul_right(calc.d(f), g), calc.mul_left(f, calc.d(g)));
    CHECK(calc.is_zero(calc.sub(lhs, rhs)));
  }

  // Dirac one-form: df = -[theta, f] on the coordinate sector.
  for (int i : ctx.alphabet()) CHECK(calc.check_d_as_commutator(alg.x(i)));
  CHECK(calc.check_d_as_commutator(alg.one()));
  if (ctx.N() == 3) {
    for (int i : ctx.alphabet())
      for (int j : ctx.alphabet())
        CHECK(calc.check_d_as_commutator(alg.mul(alg.x(i), alg.x(j))));
    for (int c : ctx.alphabet())
      if (ctx.is_invertible_coord(c)) CHECK(calc.check_d_as_commutator(alg.x(c, -1)));
  }

  // Wedge output is its own antisymmetric projection and kills the top slot.
  {
    auto w = calc.wedge(calc.basis(ctx.n()), calc.basis(ctx.n()));
    CHECK(calc.tf_is_zero(w));
    auto w2 = calc.wedge(calc.basis(1), calc.basis(-1));
    CHECK(!calc.tf_is_zero(w2));
    TensorSquare<F> as_ts;
    for (const auto& [slot, e] : w2.coeffs) as_ts.add_term(slot, e);
    auto reproj = calc.project(as_ts);
    CHECK(reproj.coeffs == w2.coeffs);
  }
}

}  // namespace

TEST_SUITE("calculus") {
  TEST_CASE("plain and barred calculi, exact") {
    for (int N = 3; N <= 5; ++N) {
      run_calculus_checks(make_exact_context(N), CalculusKind::plain);
      run_calculus_checks(make_exact_context(N), CalculusKind::barred);
    }
  }

  TEST_CASE("plain and barred calculi, sampled") {
    auto s = GaussRational::from_ratio(7, 4);
    for (int N = 3; N <= 4; ++N) {
      run_calculus_checks(make_sampled_context(N, s), CalculusKind::plain);
      run_calculus_checks(make_sampled_context(N, s), CalculusKind::barred);
    }
  }

  TEST_CASE("frozen derivative oracle") {
    auto ctx = make_exact_context(3);
    Algebra<QScalar> alg(ctx);
    auto tensors = build_tensors(ctx);
    Calculus<QScalar> calc(alg, tensors, CalculusKind::plain);
    // d(x^1 x^1) = (1 + q^-2) x^1 xi^1.
    auto lhs = calc.d(alg.mul(alg.x(1), alg.x(1)));
    OneForm<QScalar> expected;
    expected.add_term(1, alg.scale(alg.x(1), ctx.one() + ctx.q_power(-2)));
    CHECK(lhs == expected);
    // Dirac display: theta = omega_1 q^{3/2} k^{-1} r^{-2} g_{ij} x^i xi^j.
    auto theta = calc.dirac();
    for (int j : ctx.alphabet()) {
      auto expect = alg.scale(alg.mul(alg.r(1, -2), alg.x(-j)),
                              ctx.omega(1) * ctx.q_half(3) * ctx.k().inverse() *
                                  ctx.metric(-j));
      CHECK(theta.coeffs.at(j) == expect);
    }
  }

  TEST_CASE("d squared vanishes on the wedge quotient") {
    auto ctx = make_exact_context(3);
    Algebra<QScalar> alg(ctx);
    auto tensors = build_tensors(ctx);
    for (auto kind : {CalculusKind::plain, CalculusKind::barred}) {
      Calculus<QScalar> calc(alg, tensors, kind);
      for (int i : ctx.alphabet())
        for (int j : ctx.alphabet())
          CHECK(calc.tf_is_zero(calc.d_one(calc.d(alg.mul(alg.x(i), alg.x(j))))));
      std::mt19937_64 rng(0xdd5eedu + (kind == CalculusKind::barred ? 1 : 0));
      std::uniform_int_distribution<int> pick(0, 2);
      for (int rep = 0; rep < 6; ++rep) {
        auto f = alg.mul(alg.mul(alg.x(ctx.alphabet()[pick(rng)]), alg.x(ctx.alphabet()[pick(rng)])),
                         alg.x(ctx.alphabet()[pick(rng)]));
        CHECK(calc.tf_is_zero(calc.d_one(calc.d(f))));
      }
    }
  }

  TEST_CASE("classical wedge is plain antisymmetrization") {
    auto ctx = make_exact_context(3);
    Algebra<QScalar> alg(ctx);
    auto tensors = build_tensors(ctx);
    Calculus<QScalar> calc(alg, tensors, CalculusKind::plain);
    for (int i : ctx.alphabet())
      for (int j : ctx.alphabet()) {
        auto sym = calc.tf_add(calc.wedge(calc.basis(i), calc.basis(j)),
                               calc.wedge(calc.basis(j), calc.basis(i)));
        for (const auto& [slot, e] : sym.coeffs)
          for (const auto& [m, c] : e.terms) {
            auto lim = c.classical_limit();
            REQUIRE(lim.has_value());
            CHECK(lim->is_zero());
          }
      }
  }

  TEST_CASE("barred rule table is the index-flipped q-inverse of the plain one") {
    for (int N = 3; N <= 5; ++N) {
      auto ctx = make_exact_context(N);
      Algebra<QScalar> alg(ctx);
      auto tensors = build_tensors(ctx);
      Calculus<QScalar> plain(alg, tensors, CalculusKind::plain);
      Calculus<QScalar> barred(alg, tensors, CalculusKind::barred);
      SparseTensor4<QScalar> flipped;
      for (const auto& [key, v] : plain.exchange_tensor().entries())
        flipped.add({-key[0], -key[1], -key[2], -key[3]}, v.substituted_inverse());
      CHECK(flipped == barred.exchange_tensor());
    }
  }

  TEST_CASE("unsupported moves are rejected") {
    auto ctx = make_exact_context(5);
    Algebra<QScalar> alg(ctx);
    auto tensors = build_tensors(ctx);
    Calculus<QScalar> calc(alg, tensors, CalculusKind::plain);
    CHECK_THROWS_AS(calc.transport(1, alg.r(1)), UnsupportedInput);  // inner radius
    CHECK_THROWS_AS(calc.d(alg.r(2)), UnsupportedInput);
    CHECK(calc.transport(1, alg.r(2)).coeffs.size() == 1);  // top radius fine
  }
}
