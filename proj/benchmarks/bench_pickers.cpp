#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "crisp/picker.hpp"

namespace {

using namespace crisp;

// Noisy field of soft disks, the shape the pickers see in practice.
ProbabilityMap make_map(int side) {
  Image2D img(side, side);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> uni(0.0f, 0.15f);
  for (float& v : img.data) v = uni(rng);
  std::uniform_int_distribution<int> pos(20, side - 21);
  for (int n = 0; n < side / 16; ++n) {
    const int cx = pos(rng), cy = pos(rng);
    for (int dy = -10; dy <= 10; ++dy) {
      for (int dx = -10; dx <= 10; ++dx) {
        if (dx * dx + dy * dy > 100) continue;
        float& v = img.at(cx + dx, cy + dy);
        v = std::min(1.0f, v + 0.8f);
      }
    }
  }
  return ProbabilityMap(std::move(img));
}

void bench_pick_morphology(benchmark::State& state) {
  const ProbabilityMap map = make_map(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pick_morphology(map, 10.0f, 4.0f, 1.0f));
  }
}
BENCHMARK(bench_pick_morphology)->Arg(256)->Arg(512)->Arg(1024);

void bench_pick_crocker_grier(benchmark::State& state) {
  const ProbabilityMap map = make_map(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pick_crocker_grier(map, 20.0f, 0.25f, 0.7f));
  }
}
BENCHMARK(bench_pick_crocker_grier)->Arg(256)->Arg(512)->Arg(1024);

void bench_pick_nms(benchmark::State& state) {
  const ProbabilityMap map = make_map(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pick_nms(map, 20.0f, 0.5f, 0.7f));
  }
}
BENCHMARK(bench_pick_nms)->Arg(256)->Arg(512)->Arg(1024);

}  // namespace
