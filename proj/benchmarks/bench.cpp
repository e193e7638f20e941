#include <benchmark/benchmark.h>

#include "germlab/jet.hpp"

using namespace germlab;

static void bm_compose_linear(benchmark::State& state) {
  int nu = 3, n = 8;
  JetQ f(nu, n);
  for (const MultiIndex& a : all_indices(nu, n, 2))
    f.set_coeff(a, Rat(a.degree() + a[0] - a[1], 3));
  MatQ m = MatQ::identity(nu);
  m(0, 1) = Rat(1, 2);
  m(2, 0) = Rat(-2, 5);
  auto subst = linear_substitution(m, n);
  for (auto _ : state) benchmark::DoNotOptimize(compose_poly(f, subst));
}
BENCHMARK(bm_compose_linear);

BENCHMARK_MAIN();
