#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "crisp/crf.hpp"

namespace {

using namespace crisp;

struct FilterFixture {
  FeatureField scaled;
  std::vector<float> values;

  FilterFixture(int side, bool with_range) {
    Image2D img(side, side);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    for (float& v : img.data) v = uni(rng);

    FeatureField range(side, side, with_range ? 1 : 0);
    for (float& v : range.data) v = uni(rng) * 10.0f;
    const KernelSpec spec = with_range ? KernelSpec::appearance(80.0f, 13.0f, 1.0f, 2)
                                       : KernelSpec::smoothness(3.0f, 1.0f, 2);
    scaled = kernel_features(spec, range, side, side);

    values.resize(static_cast<std::size_t>(side) * side * 2);
    for (float& v : values) v = uni(rng);
  }
};

void bench_filter_bruteforce(benchmark::State& state) {
  FilterFixture fx(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter_bruteforce(fx.values, 2, fx.scaled));
  }
}
BENCHMARK(bench_filter_bruteforce)->Arg(32)->Arg(48)->Arg(64);

void bench_filter_fast_appearance(benchmark::State& state) {
  FilterFixture fx(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter_fast(fx.values, 2, fx.scaled));
  }
}
BENCHMARK(bench_filter_fast_appearance)->Arg(64)->Arg(128)->Arg(256);

void bench_filter_fast_spatial(benchmark::State& state) {
  FilterFixture fx(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter_fast(fx.values, 2, fx.scaled));
  }
}
BENCHMARK(bench_filter_fast_spatial)->Arg(64)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
