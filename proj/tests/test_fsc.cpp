#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "crisp/errors.hpp"
#include "crisp/fsc.hpp"
#include "crisp/rng.hpp"

using namespace crisp;

namespace {

Volume3D noise_volume(int side, std::uint64_t seed, float px = 1.0f) {
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  Volume3D v(side, px);
  for (float& x : v.data) x = gauss(rng);
  return v;
}

FscCurve curve_from(std::vector<std::pair<double, double>> points) {
  FscCurve c;
  for (const auto& [f, corr] : points) {
    FscShell s;
    s.frequency = f;
    s.correlation = corr;
    c.shells.push_back(s);
  }
  return c;
}

}  // namespace

TEST_CASE("a volume correlates perfectly with itself") {
  const Volume3D v = noise_volume(24, 1);
  const FscCurve curve = fsc(v, v);
  REQUIRE(curve.shells.size() == 12);
  for (const FscShell& s : curve.shells) {
    CHECK_FALSE(s.zero_energy);
    CHECK(std::abs(s.correlation - 1.0) <= 1e-5);
  }
  const ResolutionEstimate r = resolution_at(curve);
  CHECK_FALSE(r.crossed);
  CHECK(r.resolution == doctest::Approx(2.0));  // Nyquist at 1 A/px
}

TEST_CASE("shell frequencies scale with the pixel size") {
  const Volume3D a = noise_volume(16, 2, 2.0f);
  const Volume3D b = noise_volume(16, 3, 2.0f);
  const FscCurve curve = fsc(a, b);
  REQUIRE(curve.shells.size() == 8);
  CHECK(curve.pixel_size == 2.0f);
  for (std::size_t s = 0; s < curve.shells.size(); ++s) {
    CHECK(curve.shells[s].frequency ==
          doctest::Approx((s + 1) / (16.0 * 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("independent noise decorrelates") {
  const FscCurve curve = fsc(noise_volume(32, 10), noise_volume(32, 11));
  REQUIRE(curve.shells.size() == 16);
  for (std::size_t s = 3; s < curve.shells.size(); ++s) {
    CHECK(std::abs(curve.shells[s].correlation) < 0.35);
  }
}

TEST_CASE("resolution interpolates linearly at the crossing") {
  // Correlation falls from 0.9 to 0.1 between 0.1 and 0.2 cycles/A; the
  // 0.143 threshold sits at 0.1 + 0.1 * (0.757 / 0.8) cycles/A.
  const FscCurve curve = curve_from({{0.1, 0.9}, {0.2, 0.1}});
  const ResolutionEstimate r = resolution_at(curve, 0.143);
  CHECK(r.crossed);
  CHECK(std::abs(r.resolution - 5.138) <= 0.01);
}

TEST_CASE("resolution estimation edge cases") {
  // Crossing already at the first shell: no previous point to lean on.
  const ResolutionEstimate first = resolution_at(curve_from({{0.1, 0.05}, {0.2, 0.9}}));
  CHECK(first.crossed);
  CHECK(first.resolution == doctest::Approx(10.0));

  // Never crossing: Nyquist with the flag cleared.
  const ResolutionEstimate never = resolution_at(curve_from({{0.1, 0.9}, {0.25, 0.8}}));
  CHECK_FALSE(never.crossed);
  CHECK(never.resolution == doctest::Approx(4.0));

  CHECK_THROWS_AS(resolution_at(FscCurve{}), ConfigError);
}

TEST_CASE("flat volumes have no shell energy") {
  const Volume3D flat(8, 1.0f, 3.0f);
  const FscCurve curve = fsc(flat, flat);
  for (const FscShell& s : curve.shells) {
    CHECK(s.zero_energy);
    CHECK(s.correlation == 0.0);
  }
}

TEST_CASE("fsc input validation") {
  CHECK_THROWS_AS(fsc(noise_volume(8, 1), noise_volume(16, 2)), ShapeError);
  CHECK_THROWS_AS(fsc(noise_volume(8, 1, 1.0f), noise_volume(8, 2, 2.0f)), ShapeError);
  CHECK_THROWS_AS(fsc(Volume3D(1), Volume3D(1)), ConfigError);
}

TEST_CASE("phase randomization beyond Nyquist is the identity") {
  const Volume3D v = noise_volume(12, 7);
  const Volume3D same = phase_randomize(v, 0.5);
  REQUIRE(same.data.size() == v.data.size());
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    CHECK(same.data[i] == v.data[i]);  // bitwise: the input is returned as-is
  }
}

TEST_CASE("phase randomization keeps low shells and scrambles high ones") {
  const int n = 16;
  const Volume3D v = noise_volume(n, 21);
  // Cutoff at shell 4: voxels with |k| > 4 get fresh phases.
  const Volume3D scrambled = phase_randomize(v, 4.0 / n, 5);
  const FscCurve curve = fsc(v, scrambled);
  REQUIRE(curve.shells.size() == 8);
  for (int s = 0; s < 3; ++s) {  // shells 1..3 untouched
    CHECK(curve.shells[s].correlation == doctest::Approx(1.0).epsilon(1e-4));
  }
  for (int s = 4; s < 8; ++s) {  // shells 5..8 fully randomized
    CHECK(std::abs(curve.shells[s].correlation) < 0.4);
  }
}

TEST_CASE("phase randomization preserves the power spectrum") {
  const Volume3D v = noise_volume(16, 30);
  const Volume3D out = phase_randomize(v, 0.125, 3);
  double mean_in = 0.0, mean_out = 0.0;
  for (float x : v.data) mean_in += x;
  for (float x : out.data) mean_out += x;
  mean_in /= v.data.size();
  mean_out /= out.data.size();
  CHECK(mean_out == doctest::Approx(mean_in).epsilon(1e-4));

  double var_in = 0.0, var_out = 0.0;
  for (float x : v.data) var_in += (x - mean_in) * (x - mean_in);
  for (float x : out.data) var_out += (x - mean_out) * (x - mean_out);
  CHECK(var_out == doctest::Approx(var_in).epsilon(1e-3));
}

TEST_CASE("phase randomization is seeded") {
  const Volume3D v = noise_volume(12, 40);
  const Volume3D a = phase_randomize(v, 0.1, 1);
  const Volume3D b = phase_randomize(v, 0.1, 1);
  const Volume3D c = phase_randomize(v, 0.1, 2);
  bool differs = false;
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    CHECK(a.data[i] == b.data[i]);
    differs = differs || a.data[i] != c.data[i];
  }
  CHECK(differs);
}

TEST_CASE("phase randomization argument validation") {
  const Volume3D v = noise_volume(8, 50);
  CHECK_THROWS_AS(phase_randomize(v, -0.1), ConfigError);
  CHECK_THROWS_AS(phase_randomize(Volume3D(1), 0.1), ConfigError);
}
