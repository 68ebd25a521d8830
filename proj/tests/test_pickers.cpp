#include <cmath>
#include <cstdlib>
#include <vector>

#include <doctest.h>

#include "crisp/errors.hpp"
#include "crisp/image.hpp"
#include "crisp/picker.hpp"

using namespace crisp;

namespace {

void stamp_disk(Image2D& img, float cx, float cy, float r, float value = 1.0f) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const float dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r * r) img.at(x, y) = value;
    }
  }
}

// Nine well-separated clean disks of radius 8 on a 256x256 canvas.
ProbabilityMap disk_fixture(std::vector<Center>& truth) {
  Image2D img(256, 256);
  truth.clear();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const float cx = 48.0f + 80.0f * j;
      const float cy = 48.0f + 80.0f * i;
      stamp_disk(img, cx, cy, 8.0f);
      truth.push_back(Center{cx, cy, 1.0f});
    }
  }
  return ProbabilityMap(std::move(img));
}

void check_centers(const PickSet& picks, const std::vector<Center>& truth, float tol) {
  REQUIRE(picks.centers.size() == truth.size());
  for (const Center& t : truth) {
    float best = 1e9f;
    for (const Center& p : picks.centers) {
      const float d = std::hypot(p.x - t.x, p.y - t.y);
      best = std::min(best, d);
    }
    CHECK(best <= tol);
  }
}

}  // namespace

TEST_CASE("all three pickers localize clean disks") {
  std::vector<Center> truth;
  const ProbabilityMap map = disk_fixture(truth);

  check_centers(pick_morphology(map, 8.0f, 4.0f, 1.0f), truth, 2.0f);
  check_centers(pick_crocker_grier(map, 16.0f, 0.25f, 0.7f), truth, 2.0f);
  check_centers(pick_nms(map, 16.0f, 0.5f, 0.7f), truth, 2.0f);
}

TEST_CASE("blob centroids are intensity weighted") {
  Image2D img(12, 8);
  img.at(3, 3) = 0.25f;
  img.at(4, 3) = 0.75f;
  const PickSet picks = pick_crocker_grier(ProbabilityMap(std::move(img)), 3.0f, 1.0f, 0.5f);
  // Only (4,3) survives the local-max test; its window spans both pixels, so
  // the centroid lands at (0.25*3 + 0.75*4, 3) = (3.75, 3) with mass 1.
  REQUIRE(picks.centers.size() == 1);
  CHECK(picks.centers[0].x == doctest::Approx(3.75f).epsilon(1e-5));
  CHECK(picks.centers[0].y == doctest::Approx(3.0f).epsilon(1e-5));
  CHECK(picks.centers[0].score == doctest::Approx(1.0f).epsilon(1e-5));
  CHECK(picks.box_width == 3.0f);
}

TEST_CASE("duplicate suppression keeps the heavier blob") {
  Image2D img(16, 8);
  img.at(3, 3) = 0.9f;
  img.at(6, 3) = 0.6f;
  const ProbabilityMap map{std::move(img)};

  // min separation 3 * 2 = 6 swallows the lighter neighbor 3 px away.
  const PickSet strict = pick_crocker_grier(map, 3.0f, 1.0f, 2.0f);
  REQUIRE(strict.centers.size() == 1);
  CHECK(strict.centers[0].x == doctest::Approx(3.0f).epsilon(1e-5));
  CHECK(strict.centers[0].score == doctest::Approx(0.9f).epsilon(1e-5));

  // min separation 1.5 keeps both.
  const PickSet loose = pick_crocker_grier(map, 3.0f, 1.0f, 0.5f);
  CHECK(loose.centers.size() == 2);
}

TEST_CASE("uniform maps yield no picks") {
  const ProbabilityMap zeros{Image2D(64, 64)};
  CHECK(pick_morphology(zeros, 8.0f, 4.0f, 1.0f).centers.empty());
  CHECK(pick_crocker_grier(zeros, 16.0f, 0.25f, 0.7f).centers.empty());
  CHECK(pick_nms(zeros, 16.0f, 0.5f, 0.7f).centers.empty());
  const ProbabilityMap flat{Image2D(64, 64, 1.0f, 0.4f)};
  CHECK(pick_morphology(flat, 8.0f, 4.0f, 1.0f).centers.empty());
}

TEST_CASE("the morphology area gate scales as a power of the radius") {
  // One 3x3 square (area 9, enclosing radius sqrt(2)); radius 2 keeps the
  // erosions trivial and the circle test satisfied. 2^3 = 8 <= 9 passes,
  // 2^3.2 ~ 9.19 > 9 rejects.
  Image2D img(32, 32);
  for (int y = 10; y < 13; ++y) {
    for (int x = 10; x < 13; ++x) img.at(x, y) = 1.0f;
  }
  const ProbabilityMap map{std::move(img)};
  CHECK(pick_morphology(map, 2.0f, 2.0f, 3.0f).centers.size() == 1);
  CHECK(pick_morphology(map, 2.0f, 2.0f, 3.2f).centers.empty());
}

TEST_CASE("aggressive erosion erases blobs smaller than the structuring element") {
  Image2D img(64, 64);
  stamp_disk(img, 32.0f, 32.0f, 8.0f);
  const ProbabilityMap map{std::move(img)};
  CHECK(pick_morphology(map, 8.0f, 4.0f, 1.0f).centers.size() == 1);
  // e = 0.5 erodes with a 16 px square; a radius-8 disk cannot contain it.
  CHECK(pick_morphology(map, 8.0f, 0.5f, 1.0f).centers.empty());
}

TEST_CASE("morphology rejects components whose enclosing circle is off-scale") {
  Image2D img(128, 128);
  stamp_disk(img, 32.0f, 32.0f, 8.0f);   // matches radius 8
  stamp_disk(img, 96.0f, 96.0f, 30.0f);  // nearly four times too large
  const ProbabilityMap map{std::move(img)};
  const PickSet picks = pick_morphology(map, 8.0f, 4.0f, 1.0f);
  REQUIRE(picks.centers.size() == 1);
  CHECK(std::hypot(picks.centers[0].x - 32.0f, picks.centers[0].y - 32.0f) <= 2.0f);
}

TEST_CASE("run_picker treats the radius as half the box for window pickers") {
  std::vector<Center> truth;
  const ProbabilityMap map = disk_fixture(truth);

  const PickSet direct = pick_crocker_grier(map, 16.0f, 0.25f, 0.7f);
  const PickSet mapped =
      run_picker(map, PickerConfig{PickerAlgorithm::crocker_grier, 8.0f, 0.25f, 0.7f});
  REQUIRE(mapped.centers.size() == direct.centers.size());
  CHECK(mapped.box_width == 16.0f);
  for (std::size_t i = 0; i < direct.centers.size(); ++i) {
    CHECK(mapped.centers[i].x == direct.centers[i].x);
    CHECK(mapped.centers[i].y == direct.centers[i].y);
  }

  CHECK(run_picker(map, PickerConfig{PickerAlgorithm::nms, 8.0f, 0.5f, 0.7f}).box_width ==
        16.0f);
  CHECK(run_picker(map, PickerConfig{PickerAlgorithm::morphology, 8.0f, 4.0f, 1.0f})
            .box_width == 16.0f);
}

TEST_CASE("picker argument validation") {
  const ProbabilityMap map{Image2D(32, 32)};
  CHECK_THROWS_AS(pick_morphology(map, 1.5f, 4.0f, 1.0f), ConfigError);
  CHECK_THROWS_AS(pick_morphology(map, 8.0f, 0.0f, 1.0f), ConfigError);
  CHECK_THROWS_AS(pick_crocker_grier(map, 2.9f, 1.0f, 1.0f), ConfigError);
  CHECK_THROWS_AS(pick_crocker_grier(map, 16.0f, 1.0f, 0.0f), ConfigError);
  CHECK_THROWS_AS(pick_nms(map, 2.0f, 0.5f, 0.7f), ConfigError);
  // run_picker with radius 1.4 maps to diameter 2.8, below the window minimum.
  CHECK_THROWS_AS(
      run_picker(map, PickerConfig{PickerAlgorithm::crocker_grier, 1.4f, 1.0f, 1.0f}),
      ConfigError);
}

TEST_CASE("algorithm names round trip") {
  for (PickerAlgorithm a : {PickerAlgorithm::morphology, PickerAlgorithm::crocker_grier,
                            PickerAlgorithm::nms}) {
    CHECK(algorithm_from_name(algorithm_name(a)) == a);
  }
  CHECK_THROWS_AS(algorithm_from_name("laplacian"), ConfigError);
}

TEST_CASE("hyperparameter grids expose their defaults") {
  for (PickerAlgorithm a : {PickerAlgorithm::morphology, PickerAlgorithm::crocker_grier,
                            PickerAlgorithm::nms}) {
    const auto [es, ss] = default_grid(a);
    REQUIRE(es.size() == 3);
    REQUIRE(ss.size() == 3);
    CHECK(on_default_grid(a, es[1], ss[1]));
    CHECK_FALSE(on_default_grid(a, 123.0f, ss[0]));
  }
  CHECK(on_default_grid(PickerAlgorithm::morphology, 4.0f, 1.0f));
  CHECK_FALSE(on_default_grid(PickerAlgorithm::morphology, 0.15f, 0.4f));
}

TEST_CASE("binary masks convert to 0/1 probability maps") {
  LabelMask mask(4, 3, 2);
  mask.at(1, 1) = 1;
  mask.at(2, 2) = 1;
  const ProbabilityMap map = probability_map_from_mask(mask);
  CHECK(map.at(1, 1) == 1.0f);
  CHECK(map.at(2, 2) == 1.0f);
  CHECK(map.at(0, 0) == 0.0f);

  LabelMask multi(2, 2, 3);
  multi.at(0, 0) = 2;
  CHECK_THROWS_AS(probability_map_from_mask(multi), NumericalError);
}
