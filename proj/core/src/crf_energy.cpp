#include <cmath>
#include <string>

#include "crisp/crf.hpp"
#include "crisp/errors.hpp"

namespace crisp {

namespace {

constexpr std::size_t kExactCap = 4096;  // pixels; O(n^2) paths refuse more

}  // namespace

FeatureField::FeatureField(int w, int h, int d) : width(w), height(h), dim(d) {
  if (w < 0 || h < 0 || d < 0) throw ConfigError("negative feature field shape");
  data.assign(static_cast<std::size_t>(w) * h * d, 0.0f);
}

KernelSpec KernelSpec::appearance(float alpha, float beta, float weight,
                                  int num_classes) {
  KernelSpec k;
  k.kind = KernelKind::appearance;
  k.spatial_bw = alpha;
  k.range_bw = beta;
  k.class_weights.assign(num_classes, weight);
  return k;
}

KernelSpec KernelSpec::smoothness(float gamma, float weight, int num_classes) {
  KernelSpec k;
  k.kind = KernelKind::smoothness;
  k.spatial_bw = gamma;
  k.range_bw = 0.0f;
  k.class_weights.assign(num_classes, weight);
  return k;
}

void DenseCrfProblem::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("crf problem has empty grid");
  if (num_classes < 2) throw ConfigError("crf problem needs >= 2 classes");
  if (num_classes > 256) throw ConfigError("crf problem supports at most 256 classes");
  if (unary.size() != pixels() * num_classes) {
    throw ConfigError("unary size does not match pixels x classes");
  }
  for (float u : unary) {
    if (!std::isfinite(u)) throw NumericalError("non-finite unary energy");
  }
  if (!(w0 >= 0.0f) || !std::isfinite(w0)) {
    throw ConfigError("compatibility weight w0 must be finite and >= 0");
  }
  for (const KernelSpec& k : kernels) {
    if (!(k.spatial_bw > 0.0f)) throw ConfigError("kernel spatial bandwidth must be > 0");
    if (k.kind == KernelKind::appearance && !(k.range_bw > 0.0f)) {
      throw ConfigError("appearance range bandwidth must be > 0");
    }
    if (static_cast<int>(k.class_weights.size()) != num_classes) {
      throw ConfigError("kernel weight vector length != num classes");
    }
    for (float w : k.class_weights) {
      if (!(w >= 0.0f) || !std::isfinite(w)) {
        throw ConfigError("kernel weights must be finite and >= 0");
      }
    }
    if (k.kind == KernelKind::appearance) {
      if (features.dim <= 0 || features.width != width || features.height != height) {
        throw ConfigError("appearance kernel requires a matching feature field");
      }
    }
  }
  if (features.dim > 0) {
    for (float f : features.data) {
      if (!std::isfinite(f)) throw NumericalError("non-finite feature value");
    }
  }
}

LabelMask Marginals::argmax() const {
  LabelMask mask(width, height, num_classes);
  for (std::size_t i = 0; i < pixels(); ++i) {
    const float* row = q.data() + i * num_classes;
    int best = 0;
    for (int c = 1; c < num_classes; ++c) {
      if (row[c] > row[best]) best = c;
    }
    mask.labels[i] = static_cast<std::uint8_t>(best);
  }
  return mask;
}

FeatureField kernel_features(const KernelSpec& k, const FeatureField& range, int width,
                             int height) {
  const bool with_range = k.kind == KernelKind::appearance;
  if (with_range && (range.width != width || range.height != height || range.dim <= 0)) {
    throw ConfigError("kernel_features: range field shape mismatch");
  }
  const int dim = 2 + (with_range ? range.dim : 0);
  FeatureField out(width, height, dim);
  const float inv_sp = 1.0f / k.spatial_bw;
  const float inv_rg = with_range ? 1.0f / k.range_bw : 0.0f;
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x, ++i) {
      float* f = out.at(i);
      f[0] = x * inv_sp;
      f[1] = y * inv_sp;
      if (with_range) {
        const float* r = range.at(i);
        for (int d = 0; d < range.dim; ++d) f[2 + d] = r[d] * inv_rg;
      }
    }
  }
  return out;
}

double energy(const DenseCrfProblem& problem, const LabelMask& labeling) {
  problem.validate();
  if (labeling.width != problem.width || labeling.height != problem.height) {
    throw ShapeError("energy: labeling shape mismatch");
  }
  const std::size_t n = problem.pixels();
  if (n > kExactCap) {
    throw NumericalError("energy: problem exceeds the exact-evaluation cap of " +
                         std::to_string(kExactCap) + " pixels");
  }
  const int k = problem.num_classes;

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labeling.labels[i] >= k) throw NumericalError("energy: label out of class range");
    total += problem.unary[i * k + labeling.labels[i]];
  }
  if (problem.w0 == 0.0f || problem.kernels.empty()) return total;

  std::vector<FeatureField> feats;
  feats.reserve(problem.kernels.size());
  for (const KernelSpec& spec : problem.kernels) {
    feats.push_back(kernel_features(spec, problem.features, problem.width, problem.height));
  }

  double pairwise = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int xi = labeling.labels[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const int xj = labeling.labels[j];
      if (xi == xj) continue;  // Potts: only differing labels pay
      double sum = 0.0;
      for (std::size_t m = 0; m < problem.kernels.size(); ++m) {
        const FeatureField& f = feats[m];
        const float* fi = f.at(i);
        const float* fj = f.at(j);
        double d2 = 0.0;
        for (int d = 0; d < f.dim; ++d) {
          const double diff = static_cast<double>(fi[d]) - fj[d];
          d2 += diff * diff;
        }
        const auto& w = problem.kernels[m].class_weights;
        sum += 0.5 * (w[xi] + w[xj]) * std::exp(-0.5 * d2);
      }
      pairwise += sum;
    }
  }
  return total + problem.w0 * pairwise;
}

std::vector<float> filter_bruteforce(const std::vector<float>& values, int channels,
                                     const FeatureField& scaled_features) {
  const std::size_t n = scaled_features.pixels();
  if (channels <= 0) throw ConfigError("filter: channels must be > 0");
  if (values.size() != n * channels) {
    throw ConfigError("filter: values size does not match pixels x channels");
  }
  if (n > kExactCap) {
    throw NumericalError("filter_bruteforce: problem exceeds the cap of " +
                         std::to_string(kExactCap) + " pixels");
  }
  const int dim = scaled_features.dim;
  std::vector<double> acc(n * channels, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float* fi = scaled_features.at(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const float* fj = scaled_features.at(j);
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double diff = static_cast<double>(fi[d]) - fj[d];
        d2 += diff * diff;
      }
      const double kij = std::exp(-0.5 * d2);
      for (int c = 0; c < channels; ++c) {
        acc[i * channels + c] += kij * values[j * channels + c];
        acc[j * channels + c] += kij * values[i * channels + c];
      }
    }
  }
  std::vector<float> out(n * channels);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(acc[i]);
  return out;
}

}  // namespace crisp
