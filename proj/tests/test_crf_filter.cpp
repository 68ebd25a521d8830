#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "crisp/crf.hpp"
#include "crisp/errors.hpp"
#include "crisp/rng.hpp"

using namespace crisp;

namespace {

double rel_l2(const std::vector<float>& a, const std::vector<float>& b) {
  REQUIRE(a.size() == b.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    num += d * d;
    den += static_cast<double>(b[i]) * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<float> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<float> uni(0.0f, 1.0f);
  std::vector<float> v(n);
  for (float& x : v) x = uni(rng);
  return v;
}

}  // namespace

TEST_CASE("fast spatial filtering matches brute force") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int side = 32;
    const KernelSpec sm = KernelSpec::smoothness(3.0f, 1.0f, 2);
    const FeatureField f = kernel_features(sm, FeatureField{}, side, side);
    const std::vector<float> v = random_values(side * side * 2, 100 + seed);

    const std::vector<float> exact = filter_bruteforce(v, 2, f);
    const std::vector<float> fast = filter_fast(v, 2, f);
    CHECK(rel_l2(fast, exact) <= 1e-2);
  }
}

TEST_CASE("fast appearance filtering matches brute force") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int side = 32;
    std::mt19937_64 rng = make_rng(200 + seed);
    std::uniform_real_distribution<float> feat(-20.0f, 20.0f);
    FeatureField range(side, side, 1);
    for (float& x : range.data) x = feat(rng);

    const KernelSpec app = KernelSpec::appearance(20.0f, 10.0f, 1.0f, 2);
    const FeatureField f = kernel_features(app, range, side, side);
    const std::vector<float> v = random_values(side * side * 2, 300 + seed);

    const std::vector<float> exact = filter_bruteforce(v, 2, f);
    const std::vector<float> fast = filter_fast(v, 2, f);
    CHECK(rel_l2(fast, exact) <= 1e-2);
  }
}

TEST_CASE("fast filtering handles multi-channel range features") {
  const int side = 16;
  std::mt19937_64 rng = make_rng(7);
  std::uniform_real_distribution<float> feat(-5.0f, 5.0f);
  FeatureField range(side, side, 2);
  for (float& x : range.data) x = feat(rng);

  const KernelSpec app = KernelSpec::appearance(8.0f, 4.0f, 1.0f, 2);
  const FeatureField f = kernel_features(app, range, side, side);
  const std::vector<float> v = random_values(side * side, 8);

  CHECK(rel_l2(filter_fast(v, 1, f), filter_bruteforce(v, 1, f)) <= 1e-2);
}

TEST_CASE("constant range features reduce to the spatial kernel") {
  const int side = 24;
  FeatureField range(side, side, 1);
  for (float& x : range.data) x = 3.25f;

  const KernelSpec app = KernelSpec::appearance(4.0f, 2.0f, 1.0f, 2);
  const FeatureField fa = kernel_features(app, range, side, side);
  const KernelSpec sm = KernelSpec::smoothness(4.0f, 1.0f, 2);
  const FeatureField fs = kernel_features(sm, FeatureField{}, side, side);

  const std::vector<float> v = random_values(side * side, 9);
  const std::vector<float> via_grid = filter_fast(v, 1, fa);
  const std::vector<float> spatial_exact = filter_bruteforce(v, 1, fs);
  CHECK(rel_l2(via_grid, spatial_exact) <= 1e-2);
}

TEST_CASE("fast filter on large pure-spatial input stays separable and sane") {
  // 128x128 exceeds the brute-force comfort zone; check operator
  // properties instead of a reference: constants map to (row sums), i.e.
  // filtering a constant vector must equal filtering ones times the value.
  const int side = 128;
  const KernelSpec sm = KernelSpec::smoothness(2.0f, 1.0f, 2);
  const FeatureField f = kernel_features(sm, FeatureField{}, side, side);

  std::vector<float> ones(static_cast<std::size_t>(side) * side, 1.0f);
  const std::vector<float> k_ones = filter_fast(ones, 1, f);
  std::vector<float> halves(ones.size(), 0.5f);
  const std::vector<float> k_halves = filter_fast(halves, 1, f);
  for (std::size_t i = 0; i < ones.size(); ++i) {
    CHECK(k_halves[i] == doctest::Approx(0.5f * k_ones[i]).epsilon(1e-5));
  }
  // Row sums exclude self: interior pixels see sum(exp(-d^2/2)) - 1.
  double expected = 0.0;
  for (int dy = -6; dy <= 6; ++dy) {
    for (int dx = -6; dx <= 6; ++dx) {
      expected += std::exp(-(dx * dx + dy * dy) / (2.0 * 4.0));
    }
  }
  expected -= 1.0;
  CHECK(k_ones[(side / 2) * side + side / 2] == doctest::Approx(expected).epsilon(1e-2));
}

TEST_CASE("single pixel has no neighbors") {
  FeatureField f(1, 1, 2);
  const std::vector<float> v = {4.0f};
  CHECK(filter_fast(v, 1, f)[0] == 0.0f);
  CHECK(filter_bruteforce(v, 1, f)[0] == 0.0f);
}

TEST_CASE("filter argument validation") {
  FeatureField f(2, 2, 1);
  std::vector<float> v(4, 1.0f);
  CHECK_THROWS_AS(filter_fast(v, 0, f), ConfigError);
  CHECK_THROWS_AS(filter_fast(v, 3, f), ConfigError);  // size mismatch
  CHECK_THROWS_AS(filter_bruteforce(v, 3, f), ConfigError);
}

TEST_CASE("the bilateral grid refuses absurd memory footprints") {
  // A range dimension spanning a huge interval explodes the cell count.
  const int side = 8;
  FeatureField range(side, side, 3);
  std::mt19937_64 rng = make_rng(3);
  std::uniform_real_distribution<float> uni(0.0f, 2000.0f);
  for (float& x : range.data) x = uni(rng);
  const KernelSpec app = KernelSpec::appearance(1.0f, 1.0f, 1.0f, 2);
  const FeatureField f = kernel_features(app, range, side, side);
  const std::vector<float> v = random_values(side * side, 4);
  CHECK_THROWS_AS(filter_fast(v, 1, f), NumericalError);
}
