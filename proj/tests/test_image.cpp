#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include <doctest.h>

#include "crisp/errors.hpp"
#include "crisp/image.hpp"
#include "crisp/parallel.hpp"
#include "crisp/rng.hpp"

using namespace crisp;

TEST_CASE("Image2D is row-major with (x, y) accessors") {
  Image2D img(3, 2);
  CHECK(img.data.size() == 6);
  img.at(2, 0) = 1.0f;
  img.at(0, 1) = 2.0f;
  CHECK(img.data[2] == 1.0f);
  CHECK(img.data[3] == 2.0f);
  CHECK(Image2D(3, 2).pixel_size == 1.0f);
}

TEST_CASE("Image2D rejects negative shapes but allows empty ones") {
  CHECK(Image2D(0, 4).size() == 0);
  CHECK_THROWS_AS(Image2D(-1, 4), ConfigError);
  CHECK_THROWS_AS(Image2D(4, -1), ConfigError);
}

TEST_CASE("Volume3D is cubic and x-fastest") {
  Volume3D vol(3);
  vol.at(1, 0, 0) = 1.0f;
  vol.at(0, 1, 0) = 2.0f;
  vol.at(0, 0, 1) = 3.0f;
  CHECK(vol.data[1] == 1.0f);
  CHECK(vol.data[3] == 2.0f);
  CHECK(vol.data[9] == 3.0f);
}

TEST_CASE("standardize produces zero mean and unit variance") {
  std::mt19937_64 rng = make_rng(42);
  std::uniform_real_distribution<float> uni(-3.0f, 9.0f);
  Image2D img(31, 17);
  for (float& v : img.data) v = uni(rng);

  const Image2D out = standardize(img);
  double mean = 0.0;
  for (float v : out.data) mean += v;
  mean /= out.data.size();
  double var = 0.0;
  for (float v : out.data) var += (v - mean) * (v - mean);
  var /= out.data.size();
  CHECK(std::abs(mean) < 1e-5);
  CHECK(std::abs(var - 1.0) < 1e-4);
}

TEST_CASE("standardize rejects constant images") {
  Image2D img(4, 4);
  for (float& v : img.data) v = 2.5f;
  CHECK_THROWS_AS(standardize(img), NumericalError);
}

TEST_CASE("ProbabilityMap validates its range") {
  Image2D ok(2, 2);
  ok.data = {0.0f, 1.0f, 0.5f, 0.25f};
  CHECK_NOTHROW(ProbabilityMap{Image2D(ok)});

  Image2D low(2, 2);
  low.data = {0.0f, -0.001f, 0.5f, 0.25f};
  CHECK_THROWS_AS(ProbabilityMap{Image2D(low)}, NumericalError);

  Image2D high(2, 2);
  high.data = {0.0f, 1.001f, 0.5f, 0.25f};
  CHECK_THROWS_AS(ProbabilityMap{Image2D(high)}, NumericalError);

  Image2D nan_img(2, 2);
  nan_img.data = {0.0f, std::nanf(""), 0.5f, 0.25f};
  CHECK_THROWS_AS(ProbabilityMap{Image2D(nan_img)}, NumericalError);
}

TEST_CASE("binarize uses a strict greater-than threshold") {
  Image2D img(3, 1);
  img.data = {0.4f, 0.5f, 0.6f};
  const ProbabilityMap map{std::move(img)};

  const LabelMask mask = binarize(map, 0.5f);
  CHECK(mask.labels[0] == 0);
  CHECK(mask.labels[1] == 0);  // equality stays background
  CHECK(mask.labels[2] == 1);
  CHECK(mask.num_classes == 2);

  CHECK_THROWS_AS(binarize(map, 0.0f), ConfigError);
  CHECK_THROWS_AS(binarize(map, 1.0f), ConfigError);
}

TEST_CASE("LabelMask validates class count and labels") {
  CHECK_THROWS_AS(LabelMask(2, 2, 1), ConfigError);
  CHECK_THROWS_AS(LabelMask(2, 2, 257), ConfigError);
  LabelMask mask(2, 2, 2);
  mask.labels = {0, 1, 1, 0};
  CHECK_NOTHROW(mask.validate());
  mask.labels[2] = 2;
  CHECK_THROWS_AS(mask.validate(), NumericalError);
}

TEST_CASE("require_finite flags NaN and infinity") {
  std::vector<float> v = {1.0f, 2.0f};
  CHECK_NOTHROW(require_finite(v, "ok"));
  v.push_back(std::numeric_limits<float>::infinity());
  CHECK_THROWS_AS(require_finite(v, "inf"), NumericalError);
  v.back() = std::nanf("");
  CHECK_THROWS_AS(require_finite(v, "nan"), NumericalError);
}

TEST_CASE("mix_seed separates streams per item") {
  CHECK(mix_seed(1, 0) == mix_seed(1, 0));
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  // Nearby seeds must not collide over a modest scan.
  std::vector<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 64; ++base) {
    for (std::uint64_t item = 0; item < 64; ++item) seen.push_back(mix_seed(base, item));
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("resolve_threads honors explicit counts and the environment") {
  CHECK(resolve_threads(5) == 5);
  CHECK_THROWS_AS(resolve_threads(-1), ConfigError);
  setenv("CRISP_THREADS", "3", 1);
  CHECK(resolve_threads(0) == 3);
  unsetenv("CRISP_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("parallel_for visits every index exactly once") {
  const std::size_t n = 1000;
  std::vector<std::atomic<int>> hits(n);
  for (auto& h : hits) h = 0;
  parallel_for(n, 7, [&](std::size_t i) { hits[i]++; });
  for (std::size_t i = 0; i < n; ++i) CHECK(hits[i] == 1);
  parallel_for(0, 4, [&](std::size_t) { FAIL("must not run"); });
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(
      parallel_for(100, 4,
                   [](std::size_t i) {
                     if (i == 57) throw NumericalError("boom");
                   }),
      NumericalError);
}
