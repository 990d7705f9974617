#include <benchmark/benchmark.h>

#include <vector>

#include "levyconc/levyconc.hpp"

using namespace levyconc;

namespace {

void BM_ExpMomentClosedForm(benchmark::State& state) {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(exp_moment_integral(m, 0.5, 3.0));
}
BENCHMARK(BM_ExpMomentClosedForm);

void BM_ExpMomentQuadrature(benchmark::State& state) {
  const auto m = LevyMeasure1D::symmetric_exponential(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(exp_moment_integral_quadrature(m, 0.5, 3.0));
}
BENCHMARK(BM_ExpMomentQuadrature);

void BM_ChernoffThm2(benchmark::State& state) {
  const auto m = LevyMeasure1D::poisson_atom(1.0, 1.0);
  const RateFunction h = rate_thm2(m, SignClass::kNonnegative, 2.0, 2.0, 15.0);
  for (auto _ : state) benchmark::DoNotOptimize(chernoff_bound(h, 5.0));
}
BENCHMARK(BM_ChernoffThm2);

void BM_FindT(benchmark::State& state) {
  const RateFunction g = rate_thm1(LevyMeasure1D::symmetric_exponential(1.0), 0.60579336747233);
  for (auto _ : state) benchmark::DoNotOptimize(find_T(g));
}
BENCHMARK(BM_FindT);

void BM_SampleNorms(benchmark::State& state) {
  const auto spec = IDVectorSpec::iid(LevyMeasure1D::symmetric_exponential(1.0),
                                      static_cast<std::size_t>(state.range(0)));
  SamplerOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_norms(spec, 2.0, 10000, 42, opts));
  state.SetItemsProcessed(state.iterations() * 10000 * state.range(0));
}
BENCHMARK(BM_SampleNorms)->Arg(1)->Arg(10)->Arg(100);

void BM_Thm2Certificate(benchmark::State& state) {
  const auto spec = IDVectorSpec::iid(LevyMeasure1D::poisson_atom(1.0, 1.0), 10);
  const MomentSet ms = estimate_moments(spec, 2.0, 10000, 1);
  CertificateRequest req;
  req.family = BoundFamily::kThm2;
  for (int i = 0; i < 40; ++i) req.x_grid.push_back(0.5 + 0.5 * i);
  for (auto _ : state) benchmark::DoNotOptimize(make_certificate(spec, ms, req));
}
BENCHMARK(BM_Thm2Certificate);

}  // namespace

BENCHMARK_MAIN();
