#include "crisp/image.hpp"

#include <cmath>
#include <string>

#include "crisp/errors.hpp"

namespace crisp {

Image2D::Image2D(int w, int h, float px, float fill)
    : width(w), height(h), pixel_size(px) {
  if (w < 0 || h < 0) throw ConfigError("negative image dimensions");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

ProbabilityMap::ProbabilityMap(Image2D m) : map(std::move(m)) {
  for (float v : map.data) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw NumericalError("probability value outside [0,1]: " + std::to_string(v));
    }
  }
}

LabelMask::LabelMask(int w, int h, int k) : width(w), height(h), num_classes(k) {
  if (w < 0 || h < 0) throw ConfigError("negative mask dimensions");
  if (k < 2) throw ConfigError("label mask needs at least 2 classes");
  if (k > 256) throw ConfigError("label mask supports at most 256 classes");
  labels.assign(static_cast<std::size_t>(w) * h, 0);
}

void LabelMask::validate() const {
  for (std::uint8_t l : labels) {
    if (l >= num_classes) {
      throw NumericalError("label " + std::to_string(l) + " out of range for " +
                           std::to_string(num_classes) + " classes");
    }
  }
}

Volume3D::Volume3D(int side_, float px, float fill) : side(side_), pixel_size(px) {
  if (side_ < 0) throw ConfigError("negative volume side");
  data.assign(static_cast<std::size_t>(side_) * side_ * side_, fill);
}

void require_finite(const std::vector<float>& values, const char* label) {
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string(label) + " contains non-finite values");
    }
  }
}

Image2D standardize(const Image2D& img) {
  if (img.data.empty()) throw ConfigError("standardize: empty image");
  double sum = 0.0;
  for (float v : img.data) sum += v;
  const double mean = sum / img.data.size();
  double var = 0.0;
  for (float v : img.data) {
    const double d = v - mean;
    var += d * d;
  }
  var /= img.data.size();
  if (var <= 0.0) throw NumericalError("standardize: zero variance");
  const double inv_sd = 1.0 / std::sqrt(var);
  Image2D out(img.width, img.height, img.pixel_size);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = static_cast<float>((img.data[i] - mean) * inv_sd);
  }
  return out;
}

LabelMask binarize(const ProbabilityMap& p, float threshold) {
  if (!(threshold > 0.0f && threshold < 1.0f)) {
    throw ConfigError("binarize threshold must lie in (0,1)");
  }
  LabelMask mask(p.width(), p.height(), 2);
  for (std::size_t i = 0; i < p.map.data.size(); ++i) {
    mask.labels[i] = p.map.data[i] > threshold ? 1 : 0;
  }
  return mask;
}

}  // namespace crisp
