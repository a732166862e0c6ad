#include <benchmark/benchmark.h>

#include <random>

#include "qeuclid/algebra.hpp"
#include "qeuclid/braid.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/frame.hpp"
#include "qeuclid/geometry.hpp"
#include "qeuclid/sampling.hpp"
#include "qeuclid/scalar_context.hpp"

namespace {

using namespace qeuclid;

template <class F>
AlgebraElement<F> random_monomial(const Algebra<F>& alg, std::mt19937_64& rng) {
  const auto& ctx = alg.ctx();
  std::uniform_int_distribution<int> small(-2, 2);
  std::uniform_int_distribution<int> nonneg(0, 2);
  Mono m = alg.blank();
  m.alpha = small(rng);
  if (!ctx.odd()) m.beta = small(rng);
  for (int i = 1; i <= ctx.n(); ++i) m.gamma[i - 1] = small(rng);
  for (int i : ctx.alphabet())
    m.xpow[alg.pos(i)] = ctx.is_invertible_coord(i) ? small(rng) : nonneg(rng);
  AlgebraElement<F> e;
  e.add_term(m, ctx.q_half(small(rng)));
  return e;
}

void BM_BuildTensors(benchmark::State& state) {
  const auto ctx = make_exact_context(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_tensors(ctx));
}
BENCHMARK(BM_BuildTensors)->Arg(3)->Arg(4)->Arg(5)->Arg(6);

template <class F>
void product_normalization(benchmark::State& state, const ScalarContext<F>& ctx) {
  const Algebra<F> alg(ctx);
  std::mt19937_64 rng(0xbe9c0001u);
  std::vector<AlgebraElement<F>> pool;
  for (int k = 0; k < 32; ++k) pool.push_back(random_monomial(alg, rng));
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& u = pool[k % pool.size()];
    const auto& v = pool[(k + 7) % pool.size()];
    benchmark::DoNotOptimize(alg.mul(u, v));
    ++k;
  }
}

void BM_ProductExact(benchmark::State& state) {
  product_normalization(state, make_exact_context(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ProductExact)->Arg(3)->Arg(5);

void BM_ProductSampled(benchmark::State& state) {
  product_normalization(
      state, make_sampled_context(static_cast<int>(state.range(0)),
                                  GaussRational::from_ratio(5, 3)));
}
BENCHMARK(BM_ProductSampled)->Arg(3)->Arg(5);

void BM_ZeroTestFramed(benchmark::State& state) {
  const auto ctx = make_exact_context(static_cast<int>(state.range(0)));
  const Algebra<QScalar> alg(ctx);
  std::mt19937_64 rng(0xbe9c0002u);
  const auto z = alg.sub(alg.r(1, 2), alg.r_squared(1));
  const auto v = random_monomial(alg, rng);
  const auto w = random_monomial(alg, rng);
  const auto framed = alg.mul(alg.mul(v, z), w);
  for (auto _ : state) benchmark::DoNotOptimize(alg.is_zero(framed));
}
BENCHMARK(BM_ZeroTestFramed)->Arg(3)->Arg(4)->Arg(5);

void BM_DiracDerivative(benchmark::State& state) {
  const auto ctx = make_exact_context(static_cast<int>(state.range(0)));
  const Algebra<QScalar> alg(ctx);
  const auto tensors = build_tensors(ctx);
  const Calculus<QScalar> calc(alg, tensors, CalculusKind::plain);
  const auto f = alg.mul(alg.x(1), alg.x(-1));
  for (auto _ : state) benchmark::DoNotOptimize(calc.d(f));
}
BENCHMARK(BM_DiracDerivative)->Arg(3)->Arg(4)->Arg(5);

void BM_FrameData(benchmark::State& state) {
  const auto ctx = make_exact_context(static_cast<int>(state.range(0)));
  const Algebra<QScalar> alg(ctx);
  for (auto _ : state) {
    auto fd =
        build_frame_data(alg, build_gammas(ctx, CalculusKind::plain, GammaMode::theorem2));
    benchmark::DoNotOptimize(fd);
  }
}
BENCHMARK(BM_FrameData)->Arg(3)->Arg(4)->Arg(5);

void BM_CurvatureComponent(benchmark::State& state) {
  const auto ctx = make_exact_context(3);
  const Algebra<QScalar> alg(ctx);
  const auto tensors = build_tensors(ctx);
  const auto fd =
      build_frame_data(alg, build_gammas(ctx, CalculusKind::plain, GammaMode::theorem2));
  const FrameConnection<QScalar> conn(alg, tensors, fd, SigmaBranch::plus);
  for (auto _ : state) benchmark::DoNotOptimize(conn.pi12(conn.d2(conn.d_theta(1))));
}
BENCHMARK(BM_CurvatureComponent);

}  // namespace

BENCHMARK_MAIN();
