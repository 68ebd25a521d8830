#ifndef CRISP_IMAGE_HPP
#define CRISP_IMAGE_HPP

#include <cstdint>
#include <cstddef>
#include <vector>

namespace crisp {

// Single-channel float image, row-major, data[y * width + x].
// pixel_size is in Angstrom per pixel and defaults to 1.
struct Image2D {
  int width = 0;
  int height = 0;
  float pixel_size = 1.0f;
  std::vector<float> data;

  Image2D() = default;
  Image2D(int w, int h, float px = 1.0f, float fill = 0.0f);

  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Image2D& o) const { return width == o.width && height == o.height; }
};

// Per-pixel foreground probability. Construction checks every value is
// inside [0, 1]; treat the wrapped image as immutable afterwards.
struct ProbabilityMap {
  Image2D map;

  ProbabilityMap() = default;
  explicit ProbabilityMap(Image2D m);

  int width() const { return map.width; }
  int height() const { return map.height; }
  float at(int x, int y) const { return map.at(x, y); }
};

// Dense per-pixel class labels in [0, num_classes).
struct LabelMask {
  int width = 0;
  int height = 0;
  int num_classes = 2;
  std::vector<std::uint8_t> labels;

  LabelMask() = default;
  LabelMask(int w, int h, int k = 2);

  std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  void validate() const;  // throws NumericalError on out-of-range labels
};

// Cubic float volume, data[(z * side + y) * side + x].
struct Volume3D {
  int side = 0;
  float pixel_size = 1.0f;
  std::vector<float> data;

  Volume3D() = default;
  Volume3D(int side_, float px = 1.0f, float fill = 0.0f);

  float& at(int x, int y, int z) {
    return data[(static_cast<std::size_t>(z) * side + y) * side + x];
  }
  float at(int x, int y, int z) const {
    return data[(static_cast<std::size_t>(z) * side + y) * side + x];
  }
  std::size_t size() const { return data.size(); }
};

// Detection: particle center in pixel coordinates plus a confidence score.
struct Center {
  float x = 0.0f;
  float y = 0.0f;
  float score = 0.0f;
};

// A set of detections sharing one box size (width/height in pixels).
struct PickSet {
  std::vector<Center> centers;
  float box_width = 0.0f;
  float box_height = 0.0f;
};

// Throws NumericalError if any value is not finite. The label names the
// offending input in the message.
void require_finite(const std::vector<float>& values, const char* label);

// (v - mean) / sd over all pixels. Throws NumericalError when sd == 0.
Image2D standardize(const Image2D& img);

// Label 1 where p > threshold. Threshold must lie in (0, 1).
LabelMask binarize(const ProbabilityMap& p, float threshold = 0.5f);

}  // namespace crisp

#endif
