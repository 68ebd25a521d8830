#include "crisp/patchwork.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crisp/errors.hpp"

namespace crisp {

namespace {

// Infinite mirror fold of coordinate t into [0, n).
int reflect_index(int t, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = t % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

// Rising half of the blend profile: r[0] = 0, r[b-1] = 1.
std::vector<float> ramp(int bandwidth) {
  std::vector<float> r(bandwidth);
  if (bandwidth == 1) {
    r[0] = 1.0f;
    return r;
  }
  for (int i = 0; i < bandwidth; ++i) {
    r[i] = 0.5f * (1.0f - std::cos(std::numbers::pi_v<float> * i / (bandwidth - 1)));
  }
  return r;
}

// 1D blend profile, with either end optionally held flat at 1 (used for
// patches on the canvas boundary, which have no neighbor to hand off to).
std::vector<float> profile(int size, int bandwidth, bool flat_lead, bool flat_trail) {
  std::vector<float> p(size, 1.0f);
  if (bandwidth <= 0) return p;
  const std::vector<float> r = ramp(bandwidth);
  for (int i = 0; i < bandwidth; ++i) {
    if (!flat_lead) p[i] = r[i];
    if (!flat_trail) p[size - 1 - i] = std::min(p[size - 1 - i], r[i]);
  }
  return p;
}

}  // namespace

int patch_count(int extent, int size, int overlap) {
  const int stride = size - overlap;
  if (extent <= size) return 1;
  return static_cast<int>(
             std::ceil(static_cast<double>(extent - size) / stride)) + 1;
}

PatchGrid extract_patches(const Image2D& img, int size, int overlap) {
  if (size <= 0) throw ConfigError("patch size must be > 0");
  if (overlap < 0 || overlap >= size) {
    throw ConfigError("overlap must satisfy 0 <= overlap < size");
  }
  if (img.width <= 0 || img.height <= 0) throw ConfigError("extract_patches: empty image");

  PatchGrid grid;
  grid.patch_size = size;
  grid.overlap = overlap;
  grid.canvas_width = img.width;
  grid.canvas_height = img.height;

  // Mirror-pad images smaller than one patch.
  const int pw = std::max(img.width, size);
  const int ph = std::max(img.height, size);
  const int stride = size - overlap;
  grid.cols = patch_count(pw, size, overlap);
  grid.rows = patch_count(ph, size, overlap);

  for (int ry = 0; ry < grid.rows; ++ry) {
    int top = ry * stride;
    if (top + size > ph) top = ph - size;
    for (int rx = 0; rx < grid.cols; ++rx) {
      int left = rx * stride;
      if (left + size > pw) left = pw - size;
      Image2D patch(size, size, img.pixel_size);
      for (int y = 0; y < size; ++y) {
        const int sy = reflect_index(top + y, img.height);
        for (int x = 0; x < size; ++x) {
          const int sx = reflect_index(left + x, img.width);
          patch.at(x, y) = img.at(sx, sy);
        }
      }
      grid.patches.push_back(std::move(patch));
      grid.origins.emplace_back(left, top);
    }
  }
  return grid;
}

Image2D weight_map(int size, int bandwidth) {
  if (size <= 0) throw ConfigError("weight_map: size must be > 0");
  if (bandwidth < 0 || 2 * bandwidth > size) {
    throw ConfigError("weight_map: need 2 * bandwidth <= size");
  }
  const std::vector<float> p = profile(size, bandwidth, false, false);
  Image2D map(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      map.at(x, y) = p[x] * p[y];
    }
  }
  return map;
}

ProbabilityMap stitch(const PatchGrid& grid, int canvas_width, int canvas_height,
                      int bandwidth) {
  if (grid.patches.empty()) throw ConfigError("stitch: empty patch grid");
  const int size = grid.patch_size;
  if (bandwidth < 0 || 2 * bandwidth > size) {
    throw ConfigError("stitch: need 2 * bandwidth <= patch size");
  }
  if (grid.patches.size() != grid.origins.size() ||
      grid.patches.size() != static_cast<std::size_t>(grid.cols) * grid.rows) {
    throw ConfigError("stitch: inconsistent patch grid");
  }
  for (const Image2D& p : grid.patches) {
    if (p.width != size || p.height != size) {
      throw ConfigError("stitch: patch size mismatch");
    }
  }

  // One 1D profile per grid row/column: boundary patches keep full weight
  // toward the canvas edge.
  std::vector<std::vector<float>> col_profile(grid.cols), row_profile(grid.rows);
  for (int rx = 0; rx < grid.cols; ++rx) {
    col_profile[rx] = profile(size, bandwidth, rx == 0, rx == grid.cols - 1);
  }
  for (int ry = 0; ry < grid.rows; ++ry) {
    row_profile[ry] = profile(size, bandwidth, ry == 0, ry == grid.rows - 1);
  }

  std::vector<double> weighted(static_cast<std::size_t>(canvas_width) * canvas_height, 0.0);
  std::vector<double> weights(weighted.size(), 0.0);
  for (int ry = 0; ry < grid.rows; ++ry) {
    for (int rx = 0; rx < grid.cols; ++rx) {
      const std::size_t pi = static_cast<std::size_t>(ry) * grid.cols + rx;
      const Image2D& patch = grid.patches[pi];
      const auto [left, top] = grid.origins[pi];
      for (int y = 0; y < size; ++y) {
        const int cy = top + y;
        if (cy < 0 || cy >= canvas_height) continue;
        const double wy = row_profile[ry][y];
        for (int x = 0; x < size; ++x) {
          const int cx = left + x;
          if (cx < 0 || cx >= canvas_width) continue;
          const double w = col_profile[rx][x] * wy;
          const std::size_t ci = static_cast<std::size_t>(cy) * canvas_width + cx;
          weighted[ci] += w * patch.at(x, y);
          weights[ci] += w;
        }
      }
    }
  }

  Image2D out(canvas_width, canvas_height,
              grid.patches.front().pixel_size);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw NumericalError("stitch: canvas pixel " + std::to_string(i) +
                           " received no patch weight");
    }
    const double v = weighted[i] / weights[i];
    out.data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return ProbabilityMap(std::move(out));
}

}  // namespace crisp
