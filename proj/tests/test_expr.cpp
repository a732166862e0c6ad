#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"
#include "qeuclid/expr.hpp"
#include "qeuclid/gauss_rational.hpp"
#include "qeuclid/qscalar.hpp"
#include "qeuclid/scalar_context.hpp"

namespace {

using namespace qeuclid;

template <class F>
struct ExprFixture {
  ScalarContext<F> ctx;
  Algebra<F> alg;
  TensorBundle<F> tensors;
  Calculus<F> plain;
  Calculus<F> barred;
  Evaluator<F> ev;
  explicit ExprFixture(ScalarContext<F> c)
      : ctx(std::move(c)),
        alg(ctx),
        tensors(build_tensors(ctx)),
        plain(alg, tensors, CalculusKind::plain),
        barred(alg, tensors, CalculusKind::barred),
        ev(alg, &plain, &barred) {}

  AlgebraElement<F> elem(const std::string& text) const {
    return ev.eval_element(parse_expr(text, ctx.N()));
  }
  bool zero(const std::string& text) const { return alg.is_zero(elem(text)); }
};

// Random PBW-ordered monomial sums with denominator-bearing and Gaussian
// coefficients, used for the element-level round-trip property.
template <class F>
AlgebraElement<F> random_element(const Algebra<F>& alg, std::mt19937_64& rng) {
  const auto& ctx = alg.ctx();
  std::uniform_int_distribution<int> small(-2, 2), nonneg(0, 2), nterms(1, 3), halfpow(-3, 3),
      coin(0, 1);
  AlgebraElement<F> out;
  const int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    AlgebraElement<F> m = alg.one();
    if (int e = small(rng); e != 0) m = alg.mul(m, alg.L(e));
    if (!ctx.odd())
      if (int e = small(rng); e != 0) m = alg.mul(m, alg.K(e));
    for (int i = 1; i <= ctx.n(); ++i)
      if (int e = small(rng); e != 0) m = alg.mul(m, alg.r(i, e));
    for (int i : ctx.alphabet()) {
      const int e = ctx.is_invertible_coord(i) ? small(rng) : nonneg(rng);
      if (e != 0) m = alg.mul(m, alg.x(i, e));
    }
    F c = ctx.q_half(halfpow(rng)) + ctx.q_half(halfpow(rng));
    if (coin(rng)) {
      F d = ctx.q_half(halfpow(rng)) - ctx.q_half(halfpow(rng)) + ctx.one();
      if (d.is_zero()) d = ctx.one();
      c = c * d.inverse();
    }
    if (coin(rng)) c = c * ctx.imag_unit();
    out.add_all_scaled(m, c);
  }
  if (out.terms.empty()) out = alg.one();
  return out;
}

template <class F>
void run_element_roundtrip(const ExprFixture<F>& fx, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  for (int rep = 0; rep < count; ++rep) {
    const auto e = random_element(fx.alg, rng);
    const std::string text = fx.alg.to_string(e);
    CAPTURE(text);
    const auto ast = parse_expr(text, fx.ctx.N());
    CHECK(fx.alg.is_zero(fx.alg.sub(fx.ev.eval_element(ast), e)));
    // The printed canonical form is a parser fixed point.
    const std::string canon = print_expr(ast);
    CAPTURE(canon);
    const auto ast2 = parse_expr(canon, fx.ctx.N());
    CHECK(print_expr(ast2) == canon);
    CHECK(fx.alg.is_zero(fx.alg.sub(fx.ev.eval_element(ast2), e)));
  }
}

TEST_SUITE("expr") {
  TEST_CASE("syntax errors carry positions") {
    for (const char* bad : {"", "x(", "q^", "q +* x(1)", "[x(1) x(2)]", "2 +", ")q(", "xy(1)",
                            "x(1)^2^3", "x(1.5)", "q^1/", "[x(1), ]"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_expr(bad), ParseError);
    }
    try {
      parse_expr("q +* x(1)");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
  }

  TEST_CASE("index validation against the configured dimension") {
    CHECK_NOTHROW(parse_expr("x(0) + xi(-1) + xibar(1) + r(1) + L", 3));
    CHECK_THROWS_AS(parse_expr("x(3)", 3), ParseError);
    CHECK_THROWS_AS(parse_expr("x(0)", 4), ParseError);
    CHECK_THROWS_AS(parse_expr("x(0)^-1", 4), ParseError);
    CHECK_NOTHROW(parse_expr("x(0)^-1", 5));
    CHECK_THROWS_AS(parse_expr("xi(2)", 3), ParseError);
    CHECK_THROWS_AS(parse_expr("xibar(0)", 4), ParseError);
    CHECK_THROWS_AS(parse_expr("r(0)", 3), ParseError);
    CHECK_THROWS_AS(parse_expr("r(2)", 3), ParseError);
    CHECK_NOTHROW(parse_expr("r(2)", 5));
    CHECK_THROWS_AS(parse_expr("K", 3), ParseError);
    CHECK_NOTHROW(parse_expr("K^-2", 4));
  }

  TEST_CASE("quantum-plane normalization example") {
    ExprFixture<QScalar> fx(make_exact_context(3));
    const QScalar q = fx.ctx.q_power(1);
    auto expected = fx.alg.scale(fx.alg.mul(fx.alg.x(-1), fx.alg.x(1)), q - fx.ctx.one());
    expected.add_all_scaled(fx.alg.mul(fx.alg.x(0), fx.alg.x(0)), q * fx.ctx.h());
    const auto got = fx.elem("q*x(1)*x(-1) - x(-1)*x(1)");
    CHECK(fx.alg.is_zero(fx.alg.sub(got, expected)));
    CHECK(fx.zero("L*L^-1 - 1"));
  }

  TEST_CASE("scalar atom arithmetic") {
    ExprFixture<QScalar> fx(make_exact_context(3));
    CHECK(fx.zero("q^2 - q*q"));
    CHECK(fx.zero("i*i + 1"));
    CHECK(fx.zero("2^10 - 1024"));
    CHECK(fx.zero("(q + q^-1)^2 - q^2 - 2 - q^-2"));
    CHECK(fx.zero("q^1/2 * q^-1/2 - 1"));
    CHECK(fx.zero("q^3/2 * q^1/2 - q^2"));
    // A slash after a whole q-power that is not the literal 2 is a division.
    CHECK(fx.zero("q^6/3 - q*q*q*q*q*q/3"));
    CHECK(fx.zero("-q + q"));
    CHECK(fx.zero("5/3 - 5 * 3^-1"));
  }

  TEST_CASE("division and monomial inverses") {
    ExprFixture<QScalar> fx(make_exact_context(3));
    CHECK(fx.zero("x(0)^2/x(0) - x(0)"));
    CHECK(fx.zero("L^2/L - L"));
    CHECK(fx.zero("(q*r(1))^-1 - q^-1*r(1)^-1"));
    CHECK(fx.zero("1/(q - 1) - (q - 1)^-1"));
    CHECK_THROWS(fx.elem("x(1)^-1"));
    CHECK_THROWS(fx.elem("1/x(1)"));
    CHECK_THROWS(fx.elem("1/(x(0) + x(1))"));
    CHECK_THROWS(fx.elem("1/0"));
  }

  TEST_CASE("forms evaluate through the calculus") {
    ExprFixture<QScalar> fx(make_exact_context(3));
    const auto x0 = fx.alg.x(0);

    auto left = fx.ev.eval(parse_expr("x(0)*xi(1)", 3));
    REQUIRE(left.is_form());
    CHECK(left.form_tag == CalculusKind::plain);
    const auto expect_left = fx.plain.mul_left(x0, fx.plain.basis(1));
    CHECK(fx.plain.is_zero(fx.plain.sub(OneForm<QScalar>{left.form}, expect_left)));

    auto right = fx.ev.eval(parse_expr("xi(1)*x(0)", 3));
    REQUIRE(right.is_form());
    const auto expect_right = fx.plain.mul_right(fx.plain.basis(1), x0);
    CHECK(fx.plain.is_zero(fx.plain.sub(OneForm<QScalar>{right.form}, expect_right)));

    auto comm = fx.ev.eval(parse_expr("[x(0), xi(1)]", 3));
    REQUIRE(comm.is_form());
    const auto expect_comm = fx.plain.sub(expect_left, expect_right);
    CHECK(fx.plain.is_zero(fx.plain.sub(OneForm<QScalar>{comm.form}, expect_comm)));

    auto barred = fx.ev.eval(parse_expr("xibar(-1) - xibar(-1)", 3));
    REQUIRE(barred.is_form());
    CHECK(barred.form_tag == CalculusKind::barred);

    CHECK_THROWS(fx.ev.eval(parse_expr("xi(1)*xi(1)", 3)));
    CHECK_THROWS(fx.ev.eval(parse_expr("xi(1) + x(1)", 3)));
    CHECK_THROWS(fx.ev.eval(parse_expr("xi(1) + xibar(1)", 3)));
    CHECK_THROWS(fx.ev.eval(parse_expr("xi(1)^-1", 3)));
    CHECK_THROWS(fx.ev.eval(parse_expr("xi(1)^2", 3)));
    CHECK_THROWS(fx.ev.eval(parse_expr("1/xi(1)", 3)));
  }

  TEST_CASE("printer emits canonical fixed points") {
    const std::vector<std::string> canonical = {
        "x(1)",
        "-x(1)",
        "q",
        "q^-1/2",
        "q^3/2",
        "5/3",
        "i",
        "2 * i",
        "[x(1), x(-1)]",
        "L^-2 * r(1)^-1",
        "q^3/2 * L^2 * x(0)^-1 + (q - 1) * x(1)",
        "(q^3 + 2 * q^2)/(q - 1) * L^2",
        "x(0) * xi(1) + xibar(-1) * 0",
        "(1 + i) * K^2",
    };
    for (const auto& text : canonical) {
      CAPTURE(text);
      CHECK(print_expr(parse_expr(text)) == text);
    }
    // Non-canonical inputs reach the same fixed point after one round.
    for (const char* raw : {"q*x(1)", "(x(1))", "2*q^2 * L", "q^2 - (-x(1))"}) {
      CAPTURE(raw);
      const std::string canon = print_expr(parse_expr(raw));
      CHECK(print_expr(parse_expr(canon)) == canon);
    }
  }

  TEST_CASE("canonical element strings round-trip, exact field") {
    run_element_roundtrip(ExprFixture<QScalar>(make_exact_context(3)), 0x5eed1, 100);
    run_element_roundtrip(ExprFixture<QScalar>(make_exact_context(4)), 0x5eed2, 100);
  }

  TEST_CASE("canonical element strings round-trip, sampled field") {
    run_element_roundtrip(
        ExprFixture<GaussRational>(make_sampled_context(3, GaussRational::from_ratio(5, 3))),
        0x5eed3, 50);
  }

  TEST_CASE("one-form strings round-trip") {
    ExprFixture<QScalar> fx(make_exact_context(3));
    for (CalculusKind tag : {CalculusKind::plain, CalculusKind::barred}) {
      const Calculus<QScalar>& calc = tag == CalculusKind::plain ? fx.plain : fx.barred;
      OneForm<QScalar> w = calc.mul_left(fx.alg.x(0), calc.basis(1));
      w = calc.add(w, calc.mul_right(calc.basis(-1), fx.alg.x(1)));
      const std::string text = form_to_string(fx.alg, w.coeffs, tag);
      CAPTURE(text);
      const auto back = fx.ev.eval(parse_expr(text, 3));
      REQUIRE(back.is_form());
      CHECK(back.form_tag == tag);
      CHECK(calc.is_zero(calc.sub(OneForm<QScalar>{back.form}, w)));
    }
  }
}

}  // namespace
