#include <string>
#include <vector>

#include "doctest.h"
#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"
#include "qeuclid/frame.hpp"
#include "qeuclid/gauss_rational.hpp"
#include "qeuclid/qscalar.hpp"
#include "qeuclid/scalar_context.hpp"

namespace {

using namespace qeuclid;

template <class F>
struct Fixture {
  ScalarContext<F> ctx;
  Algebra<F> alg;
  TensorBundle<F> tensors;
  explicit Fixture(ScalarContext<F> c) : ctx(std::move(c)), alg(ctx), tensors(build_tensors(ctx)) {}
};

// Requires a report to be all-pass and, on failure, surfaces the first bad check.
void require_all_pass(const VerificationReport& rep) {
  const CheckResult* bad = rep.first_failure();
  if (bad != nullptr) {
    CAPTURE(bad->id);
    CAPTURE(bad->residual);
  }
  REQUIRE(rep.all_pass());
}

template <class F>
void check_gamma_tables(const ScalarContext<F>& ctx) {
  const F q = ctx.q_power(1);
  const F h2_inv = (ctx.h() * ctx.h()).inverse();
  const F k2_inv = (ctx.k() * ctx.k()).inverse();

  auto gp = build_gammas(ctx, CalculusKind::plain, GammaMode::theorem2);
  auto gb = build_gammas(ctx, CalculusKind::barred, GammaMode::theorem2);
  if (ctx.odd()) {
    // gamma_0 = -q^{-1/2} h^{-1}, gammabar_0 = q^{1/2} h^{-1}
    CHECK((gp.value(0).coeff + ctx.q_half(-1) * ctx.h().inverse()).is_zero());
    CHECK((gb.value(0).coeff - ctx.q_half(1) * ctx.h().inverse()).is_zero());
    // pair products: -q^{-1} h^{-2} plain, -q h^{-2} barred
    CHECK((gp.pair_product(1) + ctx.q_power(-1) * h2_inv).is_zero());
    CHECK((gb.pair_product(1) + q * h2_inv).is_zero());
    // positive branch takes the positive-imaginary root
    CHECK((gp.value(1).coeff - ctx.imag_unit() * ctx.h().inverse()).is_zero());
  } else {
    // pair product k^{-2} for both calculi, realized with the in-field root
    CHECK((gp.pair_product(1) - k2_inv).is_zero());
    CHECK((gb.pair_product(1) - k2_inv).is_zero());
    CHECK((gp.value(1).coeff - ctx.q_half(1) * ctx.k().inverse()).is_zero());
  }
  // free ratio gamma_a / gamma_{-a} = q
  for (int a = 1; a <= ctx.n(); ++a) {
    auto va = gp.value(a), vma = gp.value(-a);
    CHECK(va.key == vma.key);
    CHECK((va.coeff - q * vma.coeff).is_zero());
  }
  // shell products and radical squares
  for (int a = 2; a <= ctx.n(); ++a) {
    const F pair = F(ctx.zero()) - ctx.q_power(-1) * k2_inv * ctx.omega(a) * ctx.omega(a - 1);
    CHECK((gp.pair_product(a) - pair).is_zero());
    CHECK((gb.pair_product(a) - ctx.q_power(2) * pair).is_zero());
    CHECK((gp.radical_squares().at(a) - q * pair).is_zero());
    CHECK_FALSE(gp.is_rational(a));
    CHECK_FALSE(gp.is_rational(-a));
  }
  CHECK(gp.is_rational(1));
  CHECK(gp.is_rational(-1));

  // Branch flip negates the explicit special root but keeps every product.
  auto gn = build_gammas(ctx, CalculusKind::plain, GammaMode::theorem2, SignBranch::negative);
  CHECK((gn.value(1).coeff + gp.value(1).coeff).is_zero());
  CHECK((gn.pair_product(1) - gp.pair_product(1)).is_zero());

  if (ctx.odd()) {
    auto g5p = build_gammas(ctx, CalculusKind::plain, GammaMode::theorem5);
    auto g5b = build_gammas(ctx, CalculusKind::barred, GammaMode::theorem5);
    // gamma_1^2 = -q^{-2} h^{-2} and gamma_{-1} = q gamma_1
    CHECK((g5p.value(1).coeff * g5p.value(1).coeff + ctx.q_power(-2) * h2_inv).is_zero());
    CHECK((g5p.value(-1).coeff - q * g5p.value(1).coeff).is_zero());
    // gammabar_a = -q gamma_a on the specials
    for (int a : {0, 1, -1})
      CHECK((g5b.value(a).coeff + q * g5p.value(a).coeff).is_zero());
    // shell squares: gamma_a^2 = -q^{-2} omega_a omega_{a-1} k^{-2}
    for (int a = 2; a <= ctx.n(); ++a) {
      const F sq = F(ctx.zero()) - ctx.q_power(-2) * ctx.omega(a) * ctx.omega(a - 1) * k2_inv;
      CHECK((g5p.radical_squares().at(a) - sq).is_zero());
    }
  }
}

template <class F>
void check_lambda_shapes(const Fixture<F>& fx) {
  const auto& alg = fx.alg;
  const auto& ctx = fx.ctx;
  auto gp = build_gammas(ctx, CalculusKind::plain, GammaMode::theorem2);
  auto gb = build_gammas(ctx, CalculusKind::barred, GammaMode::theorem2);
  auto lp = build_lambdas(alg, gp);
  auto lb = build_lambdas(alg, gb);
  REQUIRE(lp.size() == static_cast<std::size_t>(ctx.N()));

  if (ctx.odd()) {
    CHECK(alg.is_zero(alg.sub(lp.at(0), alg.mul(alg.L(), alg.x(0, -1)))));
    CHECK(alg.is_zero(alg.sub(lb.at(0), alg.mul(alg.L(-1), alg.x(0, -1)))));
    auto expect1 = alg.mul(alg.mul(alg.L(), alg.r(1, -1)), alg.mul(alg.x(0, -1), alg.x(-1)));
    CHECK(alg.is_zero(alg.sub(lp.at(1), expect1)));
  } else {
    CHECK(alg.is_zero(alg.sub(lp.at(1), alg.mul(alg.mul(alg.L(), alg.x(1, -1)), alg.K(-1)))));
    CHECK(alg.is_zero(alg.sub(lp.at(-1), alg.mul(alg.mul(alg.L(), alg.x(-1, -1)), alg.K(1)))));
    CHECK(alg.is_zero(alg.sub(lb.at(1), alg.mul(alg.mul(alg.L(-1), alg.x(1, -1)), alg.K(1)))));
  }
  if (ctx.n() >= 2) {
    auto expect2 =
        alg.mul(alg.mul(alg.L(), alg.r(2, -1)), alg.mul(alg.r(1, -1), alg.x(-2)));
    CHECK(alg.is_zero(alg.sub(lp.at(2), expect2)));
  }
}

template <class F>
void check_e_matrix_oracles(const Fixture<F>& fx) {
  const auto& alg = fx.alg;
  const auto& ctx = fx.ctx;
  const F one = ctx.one();
  const F q = ctx.q_power(1);
  auto gp = build_gammas(ctx, CalculusKind::plain, GammaMode::theorem2);
  auto fd = build_frame_data(alg, gp);

  if (ctx.odd()) {
    // e~^0_0 = (1-q) L, and gamma_0 (1-q) = 1, so e^0_0 = L exactly.
    CHECK(alg.is_zero(alg.sub(fd.e.at({0, 0}), alg.scale(alg.L(), one - q))));
    CHECK((gp.value(0).coeff * (one - q) - one).is_zero());
    // e~^1_0 = (1-q^2) L (x^0)^{-1} x^1 and e~^{-1}_0 = 0.
    auto expect = alg.scale(alg.mul(alg.mul(alg.L(), alg.x(0, -1)), alg.x(1)),
                            one - ctx.q_power(2));
    CHECK(alg.is_zero(alg.sub(fd.e.at({1, 0}), expect)));
    CHECK(alg.is_zero(fd.e.at({-1, 0})));
  } else {
    // e~^1_1 = -k L K^{-1}, e~^{-1}_{-1} = -k L K, product k^2 L^2;
    // with gamma_1 gamma_{-1} = k^{-2} this gives e^1_1 e^{-1}_{-1} = L^2.
    const F mk = F(ctx.zero()) - ctx.k();
    CHECK(alg.is_zero(alg.sub(fd.e.at({1, 1}), alg.scale(alg.mul(alg.L(), alg.K(-1)), mk))));
    CHECK(alg.is_zero(alg.sub(fd.e.at({-1, -1}), alg.scale(alg.mul(alg.L(), alg.K(1)), mk))));
    auto prod = alg.mul(fd.e.at({1, 1}), fd.e.at({-1, -1}));
    CHECK(alg.is_zero(alg.sub(prod, alg.scale(alg.L(2), ctx.k() * ctx.k()))));
    CHECK((gp.pair_product(1) * ctx.k() * ctx.k() - one).is_zero());
    // e~^i_1 = (q^{-2} - 1) x^i lambda~_1 for i > 1.
    auto expect = alg.scale(alg.mul(alg.x(2), fd.lambdas.at(1)), ctx.q_power(-2) - one);
    CHECK(alg.is_zero(alg.sub(fd.e.at({2, 1}), expect)));
  }
}

template <class F>
void run_theorem_batteries(const Fixture<F>& fx, bool with_negative_branch) {
  const auto& alg = fx.alg;
  const auto& ctx = fx.ctx;
  for (CalculusKind tag : {CalculusKind::plain, CalculusKind::barred}) {
    auto g = build_gammas(ctx, tag, GammaMode::theorem2);
    auto fd = build_frame_data(alg, g);
    require_all_pass(verify_lambda_equation(alg, fx.tensors, tag, fd.lambdas));
    require_all_pass(verify_theorem2(alg, fx.tensors, fd));
    if (with_negative_branch) {
      auto gneg = build_gammas(ctx, tag, GammaMode::theorem2, SignBranch::negative);
      require_all_pass(verify_theorem2(alg, fx.tensors, build_frame_data(alg, gneg)));
    }
  }
}

template <class F>
void run_frame_battery(const Fixture<F>& fx, CalculusKind tag) {
  Calculus<F> calc(fx.alg, fx.tensors, tag);
  auto g = build_gammas(fx.ctx, tag, GammaMode::theorem2);
  auto fd = build_frame(fx.alg, calc, build_frame_data(fx.alg, g));
  REQUIRE(fd.frame.size() == static_cast<std::size_t>(fx.ctx.N()));
  auto rep = verify_frame(fx.alg, fx.tensors, calc, fd);
  // The direct wedge projections are evaluated only in the one-shell case.
  int wedge_checks = 0;
  for (const auto& c : rep.checks)
    if (c.id.find("wedge") != std::string::npos) ++wedge_checks;
  CHECK(wedge_checks == (fx.ctx.n() == 1 ? 2 : 0));
  require_all_pass(rep);
}

}  // namespace

TEST_SUITE("frame") {
  TEST_CASE("gamma tables match the stated products, N=3..5 exact") {
    for (int N : {3, 4, 5}) check_gamma_tables(make_exact_context(N));
  }

  TEST_CASE("glue normalization rejects even N") {
    auto ctx = make_exact_context(4);
    CHECK_THROWS_AS(build_gammas(ctx, CalculusKind::plain, GammaMode::theorem5), ConfigError);
  }

  TEST_CASE("lambda generators have the stated shape") {
    check_lambda_shapes(Fixture<QScalar>(make_exact_context(3)));
    check_lambda_shapes(Fixture<QScalar>(make_exact_context(4)));
    check_lambda_shapes(Fixture<QScalar>(make_exact_context(5)));
    auto fx = Fixture<QScalar>(make_exact_context(3));
    auto lp = build_lambdas(fx.alg, build_gammas(fx.ctx, CalculusKind::plain, GammaMode::theorem2));
    CHECK(fx.alg.to_string(lp.at(0)) == "L * x(0)^-1");
  }

  TEST_CASE("hand-computed derivation matrix entries, N=3 and N=4") {
    check_e_matrix_oracles(Fixture<QScalar>(make_exact_context(3)));
    check_e_matrix_oracles(Fixture<QScalar>(make_exact_context(4)));
  }

  TEST_CASE("lambda equation fails for a tampered generator") {
    Fixture<QScalar> fx(make_exact_context(3));
    auto g = build_gammas(fx.ctx, CalculusKind::plain, GammaMode::theorem2);
    auto lambdas = build_lambdas(fx.alg, g);
    lambdas[0] = fx.alg.mul(fx.alg.L(2), fx.alg.x(0, -1));  // wrong dilatator power
    auto rep = verify_lambda_equation(fx.alg, fx.tensors, CalculusKind::plain, lambdas);
    CHECK_FALSE(rep.all_pass());
    REQUIRE(rep.first_failure() != nullptr);
    CHECK(rep.first_failure()->id.find("thm1.rxlambda") != std::string::npos);
    CHECK_FALSE(rep.first_failure()->residual.empty());
  }

  TEST_CASE("theorems 1-4 hold exactly for N=3 and N=4, both calculi and branches") {
    run_theorem_batteries(Fixture<QScalar>(make_exact_context(3)), true);
    run_theorem_batteries(Fixture<QScalar>(make_exact_context(4)), true);
  }

  TEST_CASE("theorems 1-4 hold exactly for N=5 (radical shell in play)") {
    run_theorem_batteries(Fixture<QScalar>(make_exact_context(5)), false);
  }

  TEST_CASE("h-for-k convention breaks a gTT family at N=5") {
    Fixture<QScalar> fx(ExactContext(5, KConvention::h_equals_k, {}));
    auto g = build_gammas(fx.ctx, CalculusKind::plain, GammaMode::theorem2);
    auto rep = verify_theorem2(fx.alg, fx.tensors, build_frame_data(fx.alg, g));
    CHECK_FALSE(rep.all_pass());
    bool some_gtt_failed = false;
    for (const auto& c : rep.checks)
      if (!c.pass && c.id.find("gtt") != std::string::npos) some_gtt_failed = true;
    CHECK(some_gtt_failed);
  }

  TEST_CASE("glue theorem holds for N=3, both branches") {
    Fixture<QScalar> fx(make_exact_context(3));
    require_all_pass(verify_glue(fx.alg, fx.tensors, SignBranch::positive));
    require_all_pass(verify_glue(fx.alg, fx.tensors, SignBranch::negative));
  }

  TEST_CASE("glue theorem holds for N=5") {
    Fixture<QScalar> fx(make_exact_context(5));
    require_all_pass(verify_glue(fx.alg, fx.tensors));
  }

  TEST_CASE("glue obstruction for N=4 is reported, not computed around") {
    Fixture<QScalar> fx(make_exact_context(4));
    auto rep = verify_glue(fx.alg, fx.tensors);
    CHECK_FALSE(rep.all_pass());
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.checks[0].id == "thm5.obstruction.N4");
    CHECK(rep.checks[0].residual.find("q^2") != std::string::npos);
  }

  TEST_CASE("frame layer holds for N=3, both calculi") {
    Fixture<QScalar> fx(make_exact_context(3));
    run_frame_battery(fx, CalculusKind::plain);
    run_frame_battery(fx, CalculusKind::barred);
  }

  TEST_CASE("frame layer holds for N=4 (radical sectors in the braid family)") {
    Fixture<QScalar> fx(make_exact_context(4));
    run_frame_battery(fx, CalculusKind::plain);
    run_frame_battery(fx, CalculusKind::barred);
  }

  TEST_CASE("sampled scalars reproduce the exact verdicts at s = 5/3") {
    const GaussRational s = GaussRational::from_ratio(5, 3);
    Fixture<GaussRational> fx3(make_sampled_context(3, s));
    run_theorem_batteries(fx3, false);
    run_frame_battery(fx3, CalculusKind::plain);
    require_all_pass(verify_glue(fx3.alg, fx3.tensors));
    Fixture<GaussRational> fx4(make_sampled_context(4, s));
    run_theorem_batteries(fx4, false);
  }
}
