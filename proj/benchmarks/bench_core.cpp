#include <benchmark/benchmark.h>

#include "bqe/number_field.hpp"

using namespace bqe;

static void BM_ideal_mul(benchmark::State& state) {
  QuadField F = make_field(-5);
  Ideal x = ideal_hnf(F, {FieldElement(F, 14), FieldElement(F, Rat(3), Rat(2))});
  Ideal y = ideal_hnf(F, {FieldElement(F, 9), FieldElement(F, Rat(5), Rat(1))});
  for (auto _ : state) benchmark::DoNotOptimize(ideal_mul(x, y));
}
BENCHMARK(BM_ideal_mul);

static void BM_enumerate_radius_20(benchmark::State& state) {
  QuadField F = make_field(-5);
  Ideal one = ideal_one(F);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_elements(one, 20.0));
}
BENCHMARK(BM_enumerate_radius_20);

BENCHMARK_MAIN();
