#include <random>

#include <benchmark/benchmark.h>

#include "crisp/crf.hpp"

namespace {

using namespace crisp;

DenseCrfProblem make_problem(int side) {
  DenseCrfProblem p;
  p.width = side;
  p.height = side;
  p.num_classes = 2;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> uni(0.05f, 0.95f);
  p.unary.resize(p.pixels() * 2);
  p.features = FeatureField(side, side, 1);
  for (std::size_t i = 0; i < p.pixels(); ++i) {
    const float prob = uni(rng);
    p.unary[i * 2 + 0] = -std::log(1.0f - prob);
    p.unary[i * 2 + 1] = -std::log(prob);
    p.features.data[i] = uni(rng) * 10.0f;
  }
  p.kernels.push_back(KernelSpec::appearance(80.0f, 13.0f, 1.0f, 2));
  p.kernels.push_back(KernelSpec::smoothness(3.0f, 0.05f, 2));
  return p;
}

void bench_mean_field(benchmark::State& state) {
  const DenseCrfProblem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_field_infer(p, 5, InitMode::softmax_unary,
                                              FilterMode::fast));
  }
}
BENCHMARK(bench_mean_field)->Arg(128)->Arg(256);

void bench_frank_wolfe(benchmark::State& state) {
  const DenseCrfProblem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(frank_wolfe_infer(p, 5, StepRule::diminishing, 1.0f, 1.0f,
                                               FilterMode::fast));
  }
}
BENCHMARK(bench_frank_wolfe)->Arg(128)->Arg(256);

}  // namespace
