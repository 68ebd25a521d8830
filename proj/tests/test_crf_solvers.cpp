#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

#include "crisp/crf.hpp"
#include "crisp/errors.hpp"
#include "crisp/rng.hpp"

using namespace crisp;

namespace {

std::vector<float> softmax_neg(const std::vector<float>& u, int k) {
  std::vector<float> q(u.size());
  for (std::size_t i = 0; i < u.size() / k; ++i) {
    double z = 0.0;
    for (int c = 0; c < k; ++c) z += std::exp(-static_cast<double>(u[i * k + c]));
    for (int c = 0; c < k; ++c) {
      q[i * k + c] = static_cast<float>(std::exp(-static_cast<double>(u[i * k + c])) / z);
    }
  }
  return q;
}

// Random two-class 3x3 problem whose pairwise coupling is strictly weaker
// than every pixel's unary gap, so the ground-truth MAP is computable and
// robust. Coupling budget per pixel: w0 * weight * (n-1) at k <= 1.
DenseCrfProblem bounded_problem(std::uint64_t seed) {
  DenseCrfProblem p;
  p.width = 3;
  p.height = 3;
  p.num_classes = 2;
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<float> base(0.0f, 1.0f);
  std::uniform_real_distribution<float> gap(0.8f, 1.6f);
  std::bernoulli_distribution which(0.5);
  p.unary.resize(9 * 2);
  for (int i = 0; i < 9; ++i) {
    const float lo = base(rng);
    const float hi = lo + gap(rng);
    const bool zero_wins = which(rng);
    p.unary[i * 2 + 0] = zero_wins ? lo : hi;
    p.unary[i * 2 + 1] = zero_wins ? hi : lo;
  }
  p.w0 = 0.05f;  // max coupling 0.05 * 8 = 0.4 < min gap 0.8
  p.kernels.push_back(KernelSpec::smoothness(1.5f, 1.0f, 2));
  return p;
}

LabelMask exhaustive_map(const DenseCrfProblem& p) {
  const int n = static_cast<int>(p.pixels());
  LabelMask best(p.width, p.height, p.num_classes);
  double best_e = 0.0;
  LabelMask trial(p.width, p.height, p.num_classes);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    for (int i = 0; i < n; ++i) {
      trial.labels[i] = static_cast<std::uint8_t>((bits >> i) & 1u);
    }
    const double e = energy(p, trial);
    if (bits == 0 || e < best_e) {
      best_e = e;
      best = trial;
    }
  }
  return best;
}

LabelMask unary_argmax(const DenseCrfProblem& p) {
  LabelMask m(p.width, p.height, p.num_classes);
  for (std::size_t i = 0; i < p.pixels(); ++i) {
    int best = 0;
    for (int c = 1; c < p.num_classes; ++c) {
      if (p.unary[i * p.num_classes + c] < p.unary[i * p.num_classes + best]) best = c;
    }
    m.labels[i] = static_cast<std::uint8_t>(best);
  }
  return m;
}

}  // namespace

TEST_CASE("without coupling both solvers sit at the unary softmax") {
  DenseCrfProblem p;
  p.width = 4;
  p.height = 3;
  p.num_classes = 3;
  std::mt19937_64 rng = make_rng(11);
  std::uniform_real_distribution<float> uni(-1.0f, 2.0f);
  p.unary.resize(p.pixels() * 3);
  for (float& u : p.unary) u = uni(rng);
  p.w0 = 0.0f;
  p.kernels.push_back(KernelSpec::smoothness(2.0f, 1.0f, 3));

  const std::vector<float> expect = softmax_neg(p.unary, 3);
  const Marginals mf = mean_field_infer(p, 7);
  const Marginals fw = frank_wolfe_infer(p, 7);
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(mf.q[i] == doctest::Approx(expect[i]).epsilon(1e-5));
    CHECK(fw.q[i] == doctest::Approx(expect[i]).epsilon(1e-5));
  }
}

TEST_CASE("zero iterations return the initialization") {
  DenseCrfProblem p;
  p.width = 2;
  p.height = 2;
  p.num_classes = 2;
  p.unary = {0.1f, 0.9f, 0.4f, 0.2f, 1.2f, 0.3f, 0.0f, 0.0f};
  p.kernels.push_back(KernelSpec::smoothness(1.0f, 1.0f, 2));

  const std::vector<float> expect = softmax_neg(p.unary, 2);
  const Marginals mf = mean_field_infer(p, 0);
  const Marginals fw = frank_wolfe_infer(p, 0);
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(mf.q[i] == doctest::Approx(expect[i]).epsilon(1e-6));
    CHECK(fw.q[i] == doctest::Approx(expect[i]).epsilon(1e-6));
  }

  const Marginals uniform = mean_field_infer(p, 0, InitMode::uniform);
  for (float q : uniform.q) CHECK(q == 0.5f);
}

TEST_CASE("both solvers recover the exhaustive minimizer on bounded problems") {
  int mf_agree = 0, fw_agree = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const DenseCrfProblem p = bounded_problem(500 + t);
    const LabelMask truth = exhaustive_map(p);
    const double e_truth = energy(p, truth);
    const double e_unary = energy(p, unary_argmax(p));
    CHECK(e_truth <= e_unary + 1e-9);

    const LabelMask mf = mean_field_infer(p, 10, InitMode::softmax_unary,
                                          FilterMode::exact)
                             .argmax();
    const LabelMask fw = frank_wolfe_infer(p, 30, StepRule::diminishing, 1.0f, 1.0f,
                                           FilterMode::exact)
                             .argmax();
    // Neither solver may end up above the plain unary decision.
    CHECK(energy(p, mf) <= e_unary + 1e-6);
    CHECK(energy(p, fw) <= e_unary + 1e-6);
    if (mf.labels == truth.labels) ++mf_agree;
    if (fw.labels == truth.labels) ++fw_agree;
  }
  CHECK(mf_agree >= 18);
  CHECK(fw_agree >= 18);
}

TEST_CASE("strong coupling flips an isolated disagreeing pixel") {
  // Center weakly prefers class 1; all eight neighbors strongly prefer 0.
  DenseCrfProblem p;
  p.width = 3;
  p.height = 3;
  p.num_classes = 2;
  p.unary.assign(9 * 2, 0.0f);
  for (int i = 0; i < 9; ++i) {
    if (i == 4) {
      p.unary[i * 2 + 0] = 0.3f;  // slight pull toward label 1
      p.unary[i * 2 + 1] = 0.0f;
    } else {
      p.unary[i * 2 + 0] = 0.0f;
      p.unary[i * 2 + 1] = 3.0f;
    }
  }
  p.w0 = 2.0f;
  p.kernels.push_back(KernelSpec::smoothness(1.5f, 1.0f, 2));

  const LabelMask truth = exhaustive_map(p);
  for (int i = 0; i < 9; ++i) CHECK(truth.labels[i] == 0);

  const LabelMask mf =
      mean_field_infer(p, 10, InitMode::softmax_unary, FilterMode::exact).argmax();
  const LabelMask fw =
      frank_wolfe_infer(p, 40, StepRule::diminishing, 1.0f, 1.0f, FilterMode::exact)
          .argmax();
  CHECK(mf.labels == truth.labels);
  CHECK(fw.labels == truth.labels);
}

TEST_CASE("class relabeling permutes the marginals") {
  DenseCrfProblem p = bounded_problem(77);
  DenseCrfProblem swapped = p;
  for (std::size_t i = 0; i < p.pixels(); ++i) {
    std::swap(swapped.unary[i * 2 + 0], swapped.unary[i * 2 + 1]);
  }
  const Marginals a = mean_field_infer(p, 5, InitMode::softmax_unary, FilterMode::exact);
  const Marginals b =
      mean_field_infer(swapped, 5, InitMode::softmax_unary, FilterMode::exact);
  for (std::size_t i = 0; i < p.pixels(); ++i) {
    CHECK(a.q[i * 2 + 0] == doctest::Approx(b.q[i * 2 + 1]).epsilon(1e-5));
    CHECK(a.q[i * 2 + 1] == doctest::Approx(b.q[i * 2 + 0]).epsilon(1e-5));
  }
}

TEST_CASE("marginal rows stay on the simplex and the trace records it") {
  const DenseCrfProblem p = bounded_problem(42);
  IterationTrace mf_trace, fw_trace;
  const Marginals mf = mean_field_infer(p, 6, InitMode::softmax_unary, FilterMode::exact,
                                        1, &mf_trace);
  const Marginals fw = frank_wolfe_infer(p, 6, StepRule::diminishing, 1.0f, 1.0f,
                                         FilterMode::exact, 1, &fw_trace);
  REQUIRE(mf_trace.size() == 6);
  REQUIRE(fw_trace.size() == 6);
  for (double r : mf_trace) CHECK(r < 1e-5);
  for (double r : fw_trace) CHECK(r < 1e-5);
  for (const Marginals* m : {&mf, &fw}) {
    for (std::size_t i = 0; i < m->pixels(); ++i) {
      float sum = 0.0f;
      for (int c = 0; c < 2; ++c) {
        const float q = m->q[i * 2 + c];
        CHECK(q >= 0.0f);
        CHECK(q <= 1.0f);
        sum += q;
      }
      CHECK(sum == doctest::Approx(1.0f).epsilon(1e-5));
    }
  }
}

TEST_CASE("filter modes agree on small problems") {
  const DenseCrfProblem p = bounded_problem(9);
  const Marginals exact =
      mean_field_infer(p, 5, InitMode::softmax_unary, FilterMode::exact);
  const Marginals fast = mean_field_infer(p, 5, InitMode::softmax_unary, FilterMode::fast);
  const Marginals autom =
      mean_field_infer(p, 5, InitMode::softmax_unary, FilterMode::automatic);
  for (std::size_t i = 0; i < exact.q.size(); ++i) {
    CHECK(autom.q[i] == exact.q[i]);  // automatic picks exact at 9 pixels
    CHECK(fast.q[i] == doctest::Approx(exact.q[i]).epsilon(2e-2));
  }
}

TEST_CASE("solver argument validation") {
  const DenseCrfProblem p = bounded_problem(1);
  CHECK_THROWS_AS(mean_field_infer(p, -1), ConfigError);
  CHECK_THROWS_AS(frank_wolfe_infer(p, -1), ConfigError);
  CHECK_THROWS_AS(frank_wolfe_infer(p, 3, StepRule::diminishing, 0.0f), ConfigError);
  CHECK_THROWS_AS(frank_wolfe_infer(p, 3, StepRule::fixed, 1.0f, 0.0f), ConfigError);
  CHECK_THROWS_AS(frank_wolfe_infer(p, 3, StepRule::fixed, 1.0f, 1.5f), ConfigError);
}

TEST_CASE("fixed-step Frank-Wolfe with a full step mirrors mean-field updates") {
  // eta = 1 replaces Q by softmax(-(unary + message)/1) each round, which is
  // exactly the parallel mean-field update at regularizer 1.
  const DenseCrfProblem p = bounded_problem(314);
  const Marginals mf = mean_field_infer(p, 4, InitMode::softmax_unary, FilterMode::exact);
  const Marginals fw = frank_wolfe_infer(p, 4, StepRule::fixed, 1.0f, 1.0f,
                                         FilterMode::exact);
  for (std::size_t i = 0; i < mf.q.size(); ++i) {
    CHECK(fw.q[i] == doctest::Approx(mf.q[i]).epsilon(1e-6));
  }
}

TEST_CASE("refine cleans salt noise from a blocky probability map") {
  const int side = 48;
  ProbabilityMap noisy{Image2D(side, side)};
  Image2D image(side, side);
  LabelMask truth(side, side, 2);
  std::mt19937_64 rng = make_rng(99);
  std::uniform_real_distribution<float> flip(0.0f, 1.0f);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const bool fg = x >= 12 && x < 36 && y >= 12 && y < 36;
      truth.at(x, y) = fg ? 1 : 0;
      image.at(x, y) = fg ? 1.0f : 0.0f;
      float p = fg ? 0.9f : 0.1f;
      if (flip(rng) < 0.08f) p = 1.0f - p;  // salt
      noisy.map.at(x, y) = p;
    }
  }

  RefineConfig cfg;
  cfg.iterations = 5;
  cfg.alpha = 8.0f;
  cfg.filter = FilterMode::exact;
  IterationTrace trace;
  const ProbabilityMap out = refine(noisy, image, nullptr, cfg, &trace);
  REQUIRE(out.width() == side);
  REQUIRE(out.height() == side);
  CHECK(trace.size() == 5);

  auto iou = [&](const ProbabilityMap& pm) {
    int inter = 0, uni = 0;
    for (int i = 0; i < side * side; ++i) {
      const bool pred = pm.map.data[i] > 0.5f;
      const bool gt = truth.labels[i] == 1;
      inter += pred && gt;
      uni += pred || gt;
    }
    return static_cast<double>(inter) / uni;
  };
  CHECK(iou(out) > iou(noisy));
  for (float v : out.map.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("refine with a feature field uses it instead of intensity") {
  const int side = 32;
  ProbabilityMap flat{Image2D(side, side, 1.0f, 0.5f)};
  Image2D useless(side, side);  // pure noise, uncorrelated with the split
  FeatureField feats(side, side, 1);
  LabelMask truth(side, side, 2);
  std::mt19937_64 rng = make_rng(3);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const bool fg = x >= side / 2;
      truth.at(x, y) = fg ? 1 : 0;
      feats.at(y * side + x)[0] = fg ? 30.0f : 0.0f;
      flat.map.at(x, y) = fg ? 0.62f : 0.38f;
      useless.at(x, y) = noise(rng);
    }
  }
  RefineConfig cfg;
  cfg.iterations = 5;
  cfg.alpha = 16.0f;
  cfg.w_smoothness = 0.0f;
  cfg.filter = FilterMode::exact;
  const ProbabilityMap out = refine(flat, useless, &feats, cfg);
  int correct = 0;
  for (int i = 0; i < side * side; ++i) {
    correct += (out.map.data[i] > 0.5f) == (truth.labels[i] == 1);
  }
  CHECK(correct == side * side);
  // The same run without features leans only on the (flat) intensity image and
  // cannot sharpen the halves as much.
  const ProbabilityMap intensity = refine(flat, useless, nullptr, cfg);
  double feat_conf = 0.0, int_conf = 0.0;
  for (int i = 0; i < side * side; ++i) {
    const float t = truth.labels[i] == 1 ? 1.0f : 0.0f;
    feat_conf += 1.0 - std::abs(out.map.data[i] - t);
    int_conf += 1.0 - std::abs(intensity.map.data[i] - t);
  }
  CHECK(feat_conf > int_conf);
}

TEST_CASE("refine validates shapes and settings") {
  ProbabilityMap pm{Image2D(8, 8, 1.0f, 0.5f)};
  Image2D wrong(8, 9);
  RefineConfig cfg;
  CHECK_THROWS_AS(refine(pm, wrong, nullptr, cfg), ShapeError);

  Image2D image(8, 8);
  FeatureField bad(8, 7, 1);
  CHECK_THROWS_AS(refine(pm, image, &bad, cfg), ShapeError);

  RefineConfig neg = cfg;
  neg.iterations = -1;
  CHECK_THROWS_AS(refine(pm, image, nullptr, neg), ConfigError);
  RefineConfig clamp = cfg;
  clamp.unary_clamp = 0.0f;
  CHECK_THROWS_AS(refine(pm, image, nullptr, clamp), ConfigError);
}
