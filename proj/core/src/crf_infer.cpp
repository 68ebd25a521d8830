#include <algorithm>
#include <cmath>
#include <vector>

#include "crisp/crf.hpp"
#include "crisp/errors.hpp"
#include "crisp/parallel.hpp"

namespace crisp {

namespace {

constexpr std::size_t kAutoExactCap = 1024;  // automatic mode: exact below this

bool use_exact(FilterMode mode, std::size_t pixels) {
  switch (mode) {
    case FilterMode::exact: return true;
    case FilterMode::fast: return false;
    case FilterMode::automatic: return pixels <= kAutoExactCap;
  }
  return true;
}

// Potts message: for every kernel, filter all class channels of q, scale
// each channel by its class weight, and charge every class the total
// weighted mass of the *other* classes, scaled by w0.
std::vector<float> pairwise_message(const DenseCrfProblem& p,
                                    const std::vector<FeatureField>& feats,
                                    const std::vector<float>& q, bool exact,
                                    int threads) {
  const std::size_t n = p.pixels();
  const int k = p.num_classes;
  std::vector<float> msg(n * k, 0.0f);
  if (p.w0 == 0.0f) return msg;
  for (std::size_t m = 0; m < p.kernels.size(); ++m) {
    const auto& weights = p.kernels[m].class_weights;
    bool all_zero = true;
    for (float w : weights) all_zero = all_zero && w == 0.0f;
    if (all_zero) continue;
    const std::vector<float> filtered =
        exact ? filter_bruteforce(q, k, feats[m]) : filter_fast(q, k, feats[m]);
    parallel_for(n, threads, [&](std::size_t i) {
      const float* f = filtered.data() + i * k;
      float* out = msg.data() + i * k;
      float total = 0.0f;
      for (int c = 0; c < k; ++c) total += weights[c] * f[c];
      for (int c = 0; c < k; ++c) out[c] += p.w0 * (total - weights[c] * f[c]);
    });
  }
  return msg;
}

void row_softmax(const float* energies, int k, float scale, float* out) {
  // softmax of -scale * energies, numerically stabilized.
  float lo = energies[0];
  for (int c = 1; c < k; ++c) lo = std::min(lo, energies[c]);
  double z = 0.0;
  for (int c = 0; c < k; ++c) {
    const double e = std::exp(-static_cast<double>(scale) * (energies[c] - lo));
    out[c] = static_cast<float>(e);
    z += e;
  }
  const float inv = static_cast<float>(1.0 / z);
  for (int c = 0; c < k; ++c) out[c] *= inv;
}

std::vector<float> init_marginals(const DenseCrfProblem& p, InitMode mode, int threads) {
  const std::size_t n = p.pixels();
  const int k = p.num_classes;
  std::vector<float> q(n * k);
  if (mode == InitMode::uniform) {
    std::fill(q.begin(), q.end(), 1.0f / k);
    return q;
  }
  parallel_for(n, threads, [&](std::size_t i) {
    row_softmax(p.unary.data() + i * k, k, 1.0f, q.data() + i * k);
  });
  return q;
}

std::vector<FeatureField> build_kernel_features(const DenseCrfProblem& p) {
  std::vector<FeatureField> feats;
  feats.reserve(p.kernels.size());
  for (const KernelSpec& spec : p.kernels) {
    feats.push_back(kernel_features(spec, p.features, p.width, p.height));
  }
  return feats;
}

Marginals wrap(const DenseCrfProblem& p, std::vector<float> q) {
  Marginals m;
  m.width = p.width;
  m.height = p.height;
  m.num_classes = p.num_classes;
  m.q = std::move(q);
  return m;
}

double simplex_residual(const std::vector<float>& q, std::size_t n, int k) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int c = 0; c < k; ++c) sum += q[i * k + c];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace

Marginals mean_field_infer(const DenseCrfProblem& problem, int iterations, InitMode init,
                           FilterMode filter, int threads, IterationTrace* trace) {
  problem.validate();
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  const std::size_t n = problem.pixels();
  const int k = problem.num_classes;
  const bool exact = use_exact(filter, n);
  const std::vector<FeatureField> feats = build_kernel_features(problem);

  std::vector<float> q = init_marginals(problem, init, threads);
  for (int it = 0; it < iterations; ++it) {
    const std::vector<float> msg = pairwise_message(problem, feats, q, exact, threads);
    parallel_for(n, threads, [&](std::size_t i) {
      float energies[256];
      const float* u = problem.unary.data() + i * k;
      const float* m = msg.data() + i * k;
      for (int c = 0; c < k; ++c) energies[c] = u[c] + m[c];
      row_softmax(energies, k, 1.0f, q.data() + i * k);
    });
    if (trace) trace->push_back(simplex_residual(q, n, k));
  }
  return wrap(problem, std::move(q));
}

Marginals frank_wolfe_infer(const DenseCrfProblem& problem, int iterations, StepRule rule,
                            float regularizer, float fixed_step, FilterMode filter,
                            int threads, IterationTrace* trace) {
  problem.validate();
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (!(regularizer > 0.0f)) throw ConfigError("regularizer must be > 0");
  if (rule == StepRule::fixed && !(fixed_step > 0.0f && fixed_step <= 1.0f)) {
    throw ConfigError("fixed step must lie in (0, 1]");
  }
  const std::size_t n = problem.pixels();
  const int k = problem.num_classes;
  const bool exact = use_exact(filter, n);
  const std::vector<FeatureField> feats = build_kernel_features(problem);
  const float inv_reg = 1.0f / regularizer;

  std::vector<float> q = init_marginals(problem, InitMode::softmax_unary, threads);
  std::vector<float> s(n * k);
  for (int t = 0; t < iterations; ++t) {
    // Gradient of the relaxed energy at q, via the same filtering message.
    const std::vector<float> msg = pairwise_message(problem, feats, q, exact, threads);
    const float eta =
        rule == StepRule::fixed ? fixed_step : 2.0f / (static_cast<float>(t) + 2.0f);
    parallel_for(n, threads, [&](std::size_t i) {
      float grad[256];
      const float* u = problem.unary.data() + i * k;
      const float* m = msg.data() + i * k;
      for (int c = 0; c < k; ++c) grad[c] = u[c] + m[c];
      // Entropy-regularized linear minimization over the simplex.
      row_softmax(grad, k, inv_reg, s.data() + i * k);
      float* qi = q.data() + i * k;
      const float* si = s.data() + i * k;
      for (int c = 0; c < k; ++c) qi[c] = (1.0f - eta) * qi[c] + eta * si[c];
    });
    if (trace) trace->push_back(simplex_residual(q, n, k));
  }
  return wrap(problem, std::move(q));
}

ProbabilityMap refine(const ProbabilityMap& prob_map, const Image2D& image,
                      const FeatureField* features, const RefineConfig& config,
                      IterationTrace* trace) {
  const int w = prob_map.width(), h = prob_map.height();
  if (w <= 0 || h <= 0) throw ConfigError("refine: empty probability map");
  if (image.width != w || image.height != h) {
    throw ShapeError("refine: image shape does not match the probability map");
  }
  if (features && (features->width != w || features->height != h || features->dim <= 0)) {
    throw ShapeError("refine: feature field shape does not match the probability map");
  }
  if (config.iterations < 0) throw ConfigError("refine: iterations must be >= 0");
  const float eps = config.unary_clamp;
  if (!(eps > 0.0f && eps < 0.5f)) throw ConfigError("refine: unary clamp out of range");

  DenseCrfProblem problem;
  problem.width = w;
  problem.height = h;
  problem.num_classes = 2;
  problem.w0 = config.w0;
  const std::size_t n = problem.pixels();
  problem.unary.resize(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const float p = std::clamp(prob_map.map.data[i], eps, 1.0f - eps);
    problem.unary[i * 2 + 0] = -std::log(1.0f - p);
    problem.unary[i * 2 + 1] = -std::log(p);
  }

  if (config.w_appearance > 0.0f) {
    if (features) {
      problem.features = *features;
    } else {
      // Intensity path: standardized image, scaled so the default range
      // bandwidth matches the classic 0..255 convention.
      const Image2D st = standardize(image);
      problem.features = FeatureField(w, h, 1);
      for (std::size_t i = 0; i < n; ++i) problem.features.data[i] = st.data[i] * 10.0f;
    }
    problem.kernels.push_back(
        KernelSpec::appearance(config.alpha, config.beta, config.w_appearance, 2));
  }
  if (config.w_smoothness > 0.0f) {
    problem.kernels.push_back(KernelSpec::smoothness(config.gamma, config.w_smoothness, 2));
  }

  Marginals m;
  if (config.solver == CrfSolver::mean_field) {
    m = mean_field_infer(problem, config.iterations, InitMode::softmax_unary,
                         config.filter, config.threads, trace);
  } else {
    m = frank_wolfe_infer(problem, config.iterations, config.step_rule,
                          config.regularizer, config.fixed_step, config.filter,
                          config.threads, trace);
  }

  Image2D out(w, h, prob_map.map.pixel_size);
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = std::clamp(m.q[i * 2 + 1], 0.0f, 1.0f);
  }
  return ProbabilityMap(std::move(out));
}

}  // namespace crisp
