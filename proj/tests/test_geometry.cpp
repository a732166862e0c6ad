#include <string>
#include <vector>

#include "doctest.h"
#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"
#include "qeuclid/frame.hpp"
#include "qeuclid/gauss_rational.hpp"
#include "qeuclid/geometry.hpp"
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

void require_all_pass(const VerificationReport& rep) {
  const CheckResult* bad = rep.first_failure();
  if (bad != nullptr) {
    CAPTURE(bad->id);
    CAPTURE(bad->residual);
  }
  REQUIRE(rep.all_pass());
}

constexpr SigmaBranch kBranches[] = {SigmaBranch::plus, SigmaBranch::minus};
constexpr CalculusKind kTags[] = {CalculusKind::plain, CalculusKind::barred};

template <class F>
void check_sigma_action(const Fixture<F>& fx) {
  // sigma(xi^a (x) xi^b) = S^{ab}_{cd} xi^c (x) xi^d, entry by entry.
  Calculus<F> calc(fx.alg, fx.tensors, CalculusKind::plain);
  for (SigmaBranch b : kBranches) {
    const auto s = sigma_tensor(fx.ctx, fx.tensors, b);
    const auto rows = detail::rows_by_upper(s);
    Geometry<F> geo(calc, fx.tensors, b);
    for (int i : fx.ctx.alphabet())
      for (int j : fx.ctx.alphabet()) {
        const auto image = geo.sigma(calc.tensor(calc.basis(i), calc.basis(j)));
        auto expect_it = rows.find({i, j});
        std::size_t expected_terms = 0;
        if (expect_it != rows.end())
          for (const auto& [kl, v] : expect_it->second) {
            ++expected_terms;
            auto at = image.coeffs.find(kl);
            REQUIRE(at != image.coeffs.end());
            auto diff = at->second;
            diff.add_all_scaled(fx.alg.one(), fx.ctx.zero() - v);
            CHECK(fx.alg.is_zero(diff));
          }
        CHECK(image.coeffs.size() == expected_terms);
      }
  }
}

template <class F>
void check_braid_battery(const Fixture<F>& fx) {
  for (SigmaBranch b : kBranches) {
    std::string wit;
    const bool ok = sigma_braid_holds(fx.ctx, sigma_tensor(fx.ctx, fx.tensors, b), &wit);
    CAPTURE(branch_name(b));
    CAPTURE(wit);
    CHECK(ok);
  }
  // Negative control: the defining matrix alone (without the q factor that
  // keeps it a flip candidate) still braids, but a projector does not.
  std::string wit;
  CHECK(!sigma_braid_holds(fx.ctx, fx.tensors.proj_s, &wit));
}

template <class F>
void run_torsion_battery(const Fixture<F>& fx) {
  for (CalculusKind tag : kTags) {
    Calculus<F> calc(fx.alg, fx.tensors, tag);
    for (SigmaBranch b : kBranches) {
      Geometry<F> geo(calc, fx.tensors, b);
      require_all_pass(check_torsion_bilinearity(geo));
    }
    // Negative control: Rhat itself (no q) has a nonzero antisymmetric part
    // of S + 1, so the wedge projection does not vanish.
    CHECK(!torsion_projection_vanishes(calc, fx.tensors.rhat));
  }
}

template <class F>
void run_conformal_battery(const Fixture<F>& fx) {
  // Frozen branch factors: plus -> q^2, minus -> q^{-2}.
  bool uniform = false;
  const F fp = conformal_factor(fx.ctx, fx.tensors, SigmaBranch::plus, &uniform);
  CHECK(uniform);
  CHECK((fp - fx.ctx.q_power(2)).is_zero());
  const F fm = conformal_factor(fx.ctx, fx.tensors, SigmaBranch::minus, &uniform);
  CHECK(uniform);
  CHECK((fm - fx.ctx.q_power(-2)).is_zero());

  for (CalculusKind tag : kTags) {
    for (SigmaBranch b : kBranches)
      require_all_pass(check_conformal_compat(fx.ctx, fx.tensors, tag, b));
    require_all_pass(check_conformal_reciprocity(fx.ctx, fx.tensors, tag));
  }
}

template <class F>
void run_cov_deriv_battery(const Fixture<F>& fx) {
  for (CalculusKind tag : kTags) {
    Calculus<F> calc(fx.alg, fx.tensors, tag);
    for (SigmaBranch b : kBranches) {
      Geometry<F> geo(calc, fx.tensors, b);
      require_all_pass(check_cov_deriv(geo));
    }
  }
}

template <class F>
void run_metric_battery(const Fixture<F>& fx) {
  for (CalculusKind tag : kTags) {
    Calculus<F> calc(fx.alg, fx.tensors, tag);
    Geometry<F> geo(calc, fx.tensors, SigmaBranch::plus);

    // Values on the basis: g(xi^i (x) xi^j) = delta_{j,-i} g^{i,-i} L^{+-2}.
    const int lpow = tag == CalculusKind::plain ? 2 : -2;
    for (int i : fx.ctx.alphabet())
      for (int j : fx.ctx.alphabet()) {
        auto val = geo.metric_apply(calc.tensor(calc.basis(i), calc.basis(j)));
        if (j == -i)
          val.add_all_scaled(fx.alg.L(lpow), fx.ctx.zero() - fx.ctx.metric(i));
        CHECK(fx.alg.is_zero(val));
      }

    std::vector<AlgebraElement<F>> fs;
    for (int c : fx.ctx.alphabet()) fs.push_back(fx.alg.x(c));
    fs.push_back(fx.alg.mul(fx.alg.x(fx.ctx.n()), fx.alg.x(-fx.ctx.n())));
    require_all_pass(check_metric(geo, fs));
  }
}

template <class F>
void run_frame_metric_battery(const Fixture<F>& fx) {
  for (CalculusKind tag : kTags) {
    Calculus<F> calc(fx.alg, fx.tensors, tag);
    auto g = build_gammas(fx.ctx, tag, GammaMode::theorem2);
    auto fd = build_frame(fx.alg, calc, build_frame_data(fx.alg, g));
    for (SigmaBranch b : kBranches) {
      Geometry<F> geo(calc, fx.tensors, b);
      require_all_pass(check_sigma_frame_constancy(geo, fd));
      if (b == SigmaBranch::plus) require_all_pass(check_metric_frame(geo, fd));
    }
  }
}

template <class F>
void run_curvature_battery(const Fixture<F>& fx) {
  for (CalculusKind tag : kTags) {
    Calculus<F> calc(fx.alg, fx.tensors, tag);
    auto g = build_gammas(fx.ctx, tag, GammaMode::theorem2);
    auto fd = build_frame(fx.alg, calc, build_frame_data(fx.alg, g));
    for (SigmaBranch b : kBranches) {
      const auto rep = check_curvature(fx.alg, fx.tensors, fd, b);
      CHECK(rep.checks.size() == fx.ctx.alphabet().size());
      require_all_pass(rep);
    }
    // Negative control: replacing the flip by the identity map yields a
    // connection that is not flat.
    FrameConnection<F> flipped(fx.alg, fx.tensors, fd, SigmaBranch::plus, true);
    CHECK(!flipped.curvature().all_zero(fx.alg));
  }
}

TEST_SUITE("geometry") {
  TEST_CASE("sigma acts on basis tensors by its matrix entries") {
    check_sigma_action(Fixture<QScalar>(make_exact_context(3)));
    check_sigma_action(Fixture<QScalar>(make_exact_context(4)));
  }

  TEST_CASE("sigma satisfies the braid relation") {
    check_braid_battery(Fixture<QScalar>(make_exact_context(3)));
    check_braid_battery(Fixture<QScalar>(make_exact_context(4)));
  }

  TEST_CASE("sigma degenerates to the plain flip at q = 1") {
    const SampledContext ctx(3, KConvention::standard, {GaussRational(1)});
    const auto tensors = build_tensors(ctx);
    SparseTensor4<GaussRational> flip;
    for (int i : ctx.alphabet())
      for (int j : ctx.alphabet()) flip.add({i, j, j, i}, ctx.one());
    for (SigmaBranch b : kBranches)
      CHECK((sigma_tensor(ctx, tensors, b) - flip).is_zero());
  }

  TEST_CASE("torsion projection vanishes for both branches and calculi") {
    run_torsion_battery(Fixture<QScalar>(make_exact_context(3)));
    run_torsion_battery(Fixture<QScalar>(make_exact_context(4)));
    run_torsion_battery(Fixture<QScalar>(make_exact_context(5)));
  }

  TEST_CASE("metric compatibility holds up to the conformal factor") {
    run_conformal_battery(Fixture<QScalar>(make_exact_context(3)));
    run_conformal_battery(Fixture<QScalar>(make_exact_context(4)));
    run_conformal_battery(Fixture<QScalar>(make_exact_context(5)));
  }

  TEST_CASE("strict metric compatibility is restored at q = 1") {
    const SampledContext ctx(3, KConvention::standard, {GaussRational(1)});
    const auto tensors = build_tensors(ctx);
    bool uniform = false;
    const auto f = conformal_factor(ctx, tensors, SigmaBranch::plus, &uniform);
    CHECK(uniform);
    CHECK((f - ctx.one()).is_zero());
    for (SigmaBranch b : kBranches)
      require_all_pass(check_conformal_compat(ctx, tensors, CalculusKind::plain, b));
  }

  TEST_CASE("covariant derivative obeys both Leibniz rules and is torsion-free") {
    run_cov_deriv_battery(Fixture<QScalar>(make_exact_context(3)));
    run_cov_deriv_battery(Fixture<QScalar>(make_exact_context(4)));
  }

  TEST_CASE("metric map is bilinear and takes the stated basis values") {
    run_metric_battery(Fixture<QScalar>(make_exact_context(3)));
  }

  TEST_CASE("frame metric values are the constant metric matrix") {
    run_frame_metric_battery(Fixture<QScalar>(make_exact_context(3)));
  }

  TEST_CASE("curvature of the frame connection vanishes") {
    run_curvature_battery(Fixture<QScalar>(make_exact_context(3)));
  }

  TEST_CASE("frame connection refuses even dimension") {
    Fixture<QScalar> fx(make_exact_context(4));
    Calculus<QScalar> calc(fx.alg, fx.tensors, CalculusKind::plain);
    auto g = build_gammas(fx.ctx, CalculusKind::plain, GammaMode::theorem2);
    auto fd = build_frame(fx.alg, calc, build_frame_data(fx.alg, g));
    CHECK_THROWS_AS(FrameConnection<QScalar>(fx.alg, fx.tensors, fd, SigmaBranch::plus),
                    UnsupportedInput);
  }

  TEST_CASE("sampled scalars reproduce the exact geometry verdicts") {
    Fixture<GaussRational> fx(make_sampled_context(3, GaussRational(mpq_class(5, 3))));
    run_torsion_battery(fx);
    run_conformal_battery(fx);
    run_cov_deriv_battery(fx);
    run_metric_battery(fx);
    run_curvature_battery(fx);
  }
}

}  // namespace
