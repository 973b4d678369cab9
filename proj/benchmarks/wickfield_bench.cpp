#include <benchmark/benchmark.h>

#include <random>

#include "wickfield/fields.hpp"
#include "wickfield/oracle.hpp"
#include "wickfield/sampler.hpp"

using namespace wickfield;

static void BM_GaussianComplexEval(benchmark::State& state) {
  const Kernel k = Kernel::gaussian(2);
  const ComplexPoint z{Complex(0.3, 0.4), Complex(-0.2, 0.1)};
  const Point x{0.1, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(k.eval_complex(z, x));
}
BENCHMARK(BM_GaussianComplexEval);

static void BM_BesselComplexEval(benchmark::State& state) {
  const Kernel k = Kernel::mollified_bessel(static_cast<int>(state.range(0)), 0.5, 1.0);
  ComplexPoint z(k.ambient_dim());
  z[0] = Complex(0.8, 0.5);
  const Point x(k.ambient_dim());
  k.eval_complex(z, x);
  for (auto _ : state) benchmark::DoNotOptimize(k.eval_complex(z, x));
}
BENCHMARK(BM_BesselComplexEval)->Arg(1)->Arg(2);

static void BM_SamplerStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::vector<Interval> side(d, Interval{0.0, d == 1 ? 4.0 : 6.0});
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(d), Window::box(side));
  SamplerConfig cfg;
  ChainState s(p, 1);
  Diagnostics diag;
  for (int i = 0; i < 2000; ++i) s.step(cfg, diag);
  for (auto _ : state) benchmark::DoNotOptimize(s.step(cfg, diag));
}
BENCHMARK(BM_SamplerStep)->Arg(1)->Arg(2);

static void BM_MomentSample(benchmark::State& state) {
  const Kernel k = Kernel::gaussian(2);
  std::mt19937_64 rng(3);
  const Configuration eta = sample_poisson(Window::box({{-5.0, 5.0}, {-5.0, 5.0}}), 1.0, rng);
  const MomentQuery q{{ComplexPoint{Complex(0.0, 0.2), Complex(0.1)}, ComplexPoint{Complex(0.3), Complex(-0.2)}},
                      {true, false}};
  for (auto _ : state) benchmark::DoNotOptimize(moment_sample(eta, k, q));
}
BENCHMARK(BM_MomentSample);

static void BM_OracleCount(benchmark::State& state) {
  const Window w = Window::box({{0.0, 1.0}});
  const PotentialSpec p(Profile::widom_rowlinson(), 1.0, Kernel::gaussian(1), w);
  SeriesSpec spec;
  spec.window = w;
  spec.nmax = static_cast<int>(state.range(0));
  spec.tail_tol = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(expect(spec, p, count_functional(1)));
}
BENCHMARK(BM_OracleCount)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
