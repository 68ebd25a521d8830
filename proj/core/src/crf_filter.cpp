#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "crisp/crf.hpp"
#include "crisp/errors.hpp"

namespace crisp {

namespace {

// ---- separable truncated convolution for pure-spatial kernels ----------

struct SpatialScale {
  bool pure_spatial = false;
  float sigma_x = 0, sigma_y = 0;  // pixels
};

// A feature field built as [x/sx, y/sy] matches the pixel grid bitwise
// (kernel_features computes it the same way), so exact comparison is safe.
SpatialScale detect_spatial(const FeatureField& f) {
  SpatialScale r;
  if (f.dim != 2 || f.width <= 0 || f.height <= 0) return r;
  const int w = f.width, h = f.height;
  float inv_x = 0, inv_y = 0;
  if (w > 1) {
    inv_x = f.data[2] - f.data[0];
  }
  if (h > 1) {
    inv_y = f.data[static_cast<std::size_t>(w) * 2 + 1] - f.data[1];
  }
  if (w > 1 && !(inv_x > 0)) return r;
  if (h > 1 && !(inv_y > 0)) return r;
  if (w == 1 && h == 1) return r;  // single pixel, caller handles directly
  if (w == 1) inv_x = inv_y;
  if (h == 1) inv_y = inv_x;
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      if (f.data[i * 2] != x * inv_x || f.data[i * 2 + 1] != y * inv_y) return r;
    }
  }
  r.pure_spatial = true;
  r.sigma_x = 1.0f / inv_x;
  r.sigma_y = 1.0f / inv_y;
  return r;
}

std::vector<float> gauss_taps(float sigma) {
  const int radius = static_cast<int>(std::ceil(3.0f * sigma));
  std::vector<float> taps(radius + 1);
  for (int d = 0; d <= radius; ++d) {
    taps[d] = std::exp(-0.5f * (d / sigma) * (d / sigma));
  }
  return taps;
}

std::vector<float> separable_filter(const std::vector<float>& values, int channels,
                                    int width, int height, float sigma_x, float sigma_y) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const std::vector<float> tx = gauss_taps(sigma_x);
  const std::vector<float> ty = gauss_taps(sigma_y);
  const int rx = static_cast<int>(tx.size()) - 1;
  const int ry = static_cast<int>(ty.size()) - 1;

  std::vector<float> tmp(n * channels, 0.0f);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int lo = std::max(0, x - rx), hi = std::min(width - 1, x + rx);
      float* out = tmp.data() + (static_cast<std::size_t>(y) * width + x) * channels;
      for (int xx = lo; xx <= hi; ++xx) {
        const float g = tx[std::abs(xx - x)];
        const float* in =
            values.data() + (static_cast<std::size_t>(y) * width + xx) * channels;
        for (int c = 0; c < channels; ++c) out[c] += g * in[c];
      }
    }
  }

  std::vector<float> out(n * channels, 0.0f);
  for (int y = 0; y < height; ++y) {
    const int lo = std::max(0, y - ry), hi = std::min(height - 1, y + ry);
    for (int x = 0; x < width; ++x) {
      float* o = out.data() + (static_cast<std::size_t>(y) * width + x) * channels;
      for (int yy = lo; yy <= hi; ++yy) {
        const float g = ty[std::abs(yy - y)];
        const float* in =
            tmp.data() + (static_cast<std::size_t>(yy) * width + x) * channels;
        for (int c = 0; c < channels; ++c) o[c] += g * in[c];
      }
    }
  }

  // Remove the self term (tap weight at distance 0 is exactly 1 on each axis).
  for (std::size_t i = 0; i < n * channels; ++i) out[i] -= values[i];
  return out;
}

// ---- downsampled bilateral grid for mixed-domain kernels ---------------

// Cell size in bandwidth units. Splat and slice use quadratic B-spline
// weights over three cells per axis: unlike linear tents, the B-spline's
// discrete second moment (h^2/4 per stage) does not depend on where a
// sample falls inside its cell, so compensating the blur variance down to
// 1 - h^2/2 and its amplitude by 1/sqrt(1 - h^2/2) makes the composite
// kernel match exp(-d^2/2) up to O(h^4) for every pair, not just on
// average over cell offsets.
constexpr float kCellSize = 0.25f;
constexpr std::size_t kMaxGridCells = std::size_t{1} << 26;

struct BilateralGrid {
  int dims = 0;
  std::vector<int> extent;     // cells per axis, including blur padding
  std::vector<std::size_t> stride;
  std::vector<float> lo;       // feature-space origin (before padding)
  int pad = 0;
  std::size_t cells = 1;
};

BilateralGrid plan_grid(const FeatureField& f, int blur_radius) {
  BilateralGrid g;
  g.dims = f.dim;
  g.pad = blur_radius + 1;
  g.extent.resize(f.dim);
  g.lo.resize(f.dim);
  const std::size_t n = f.pixels();
  for (int d = 0; d < f.dim; ++d) {
    float lo = f.data[d], hi = f.data[d];
    for (std::size_t i = 1; i < n; ++i) {
      const float v = f.at(i)[d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    g.lo[d] = lo;
    // Three-cell splat support plus a full blur window on either side.
    const int span = static_cast<int>(std::floor((hi - lo) / kCellSize)) + 4;
    g.extent[d] = span + 2 * blur_radius;
  }
  g.stride.resize(f.dim);
  g.cells = 1;
  for (int d = f.dim - 1; d >= 0; --d) {
    g.stride[d] = g.cells;
    g.cells *= static_cast<std::size_t>(g.extent[d]);
    if (g.cells > kMaxGridCells) {
      throw NumericalError(
          "filter_fast: bilateral grid would need " + std::to_string(g.cells) +
          " cells; reduce the feature dimension or use exact filtering");
    }
  }
  return g;
}

// Quadratic B-spline weights for the three cells around a sample, given
// its offset u in [-0.5, 0.5] from the nearest cell center.
inline void bspline_weights(float u, float w[3]) {
  w[0] = 0.5f * (0.5f - u) * (0.5f - u);
  w[1] = 0.75f - u * u;
  w[2] = 0.5f * (0.5f + u) * (0.5f + u);
}

std::vector<float> grid_filter(const std::vector<float>& values, int channels,
                               const FeatureField& f) {
  const std::size_t n = f.pixels();
  const int dims = f.dim;
  const float blur_sigma2 = 1.0f - kCellSize * kCellSize / 2.0f;
  const float blur_scale = 1.0f / std::sqrt(blur_sigma2);
  const int blur_radius = static_cast<int>(std::ceil(3.0f / kCellSize));
  std::vector<float> blur_taps(blur_radius + 1);
  for (int j = 0; j <= blur_radius; ++j) {
    const float d = j * kCellSize;
    blur_taps[j] = blur_scale * std::exp(-0.5f * d * d / blur_sigma2);
  }

  const BilateralGrid g = plan_grid(f, blur_radius);
  std::vector<float> grid(g.cells * channels, 0.0f);

  // Per-pixel base cell and cell-center offsets, reused by splat & slice.
  std::vector<std::size_t> base(n);
  std::vector<float> frac(n * dims);
  for (std::size_t i = 0; i < n; ++i) {
    const float* fi = f.at(i);
    std::size_t cell = 0;
    for (int d = 0; d < dims; ++d) {
      const float t = (fi[d] - g.lo[d]) / kCellSize;
      const int b = static_cast<int>(std::floor(t + 0.5f));
      frac[i * dims + d] = t - b;
      cell += static_cast<std::size_t>(b + g.pad - 1) * g.stride[d];
    }
    base[i] = cell;
  }

  int corners = 1;
  for (int d = 0; d < dims; ++d) corners *= 3;
  std::vector<float> wgt(static_cast<std::size_t>(dims) * 3);

  // Splat with B-spline weights.
  for (std::size_t i = 0; i < n; ++i) {
    const float* fr = &frac[i * dims];
    for (int d = 0; d < dims; ++d) bspline_weights(fr[d], &wgt[d * 3]);
    const float* v = values.data() + i * channels;
    for (int corner = 0; corner < corners; ++corner) {
      float w = 1.0f;
      std::size_t cell = base[i];
      for (int d = 0, rem = corner; d < dims; ++d, rem /= 3) {
        const int p = rem % 3;
        w *= wgt[d * 3 + p];
        cell += static_cast<std::size_t>(p) * g.stride[d];
      }
      float* dst = grid.data() + cell * channels;
      for (int c = 0; c < channels; ++c) dst[c] += w * v[c];
    }
  }

  // Separable Gaussian blur along each grid axis.
  std::vector<float> line;
  for (int d = 0; d < dims; ++d) {
    const int len = g.extent[d];
    const std::size_t stride = g.stride[d] * channels;
    const std::size_t lines = g.cells / static_cast<std::size_t>(len);
    line.assign(static_cast<std::size_t>(len) * channels, 0.0f);
    // Enumerate all 1D lines along axis d.
    for (std::size_t l = 0; l < lines; ++l) {
      // Decode the l-th line's starting cell (axis d coordinate = 0).
      std::size_t rem = l, start = 0;
      for (int dd = 0; dd < dims; ++dd) {
        if (dd == d) continue;
        const std::size_t count = static_cast<std::size_t>(g.extent[dd]);
        const std::size_t coord = rem % count;
        rem /= count;
        start += coord * g.stride[dd];
      }
      float* cells0 = grid.data() + start * channels;
      for (int p = 0; p < len; ++p) {
        std::copy_n(cells0 + static_cast<std::size_t>(p) * stride, channels,
                    line.data() + static_cast<std::size_t>(p) * channels);
      }
      for (int p = 0; p < len; ++p) {
        const int lo = std::max(0, p - blur_radius);
        const int hi = std::min(len - 1, p + blur_radius);
        float* dst = cells0 + static_cast<std::size_t>(p) * stride;
        for (int c = 0; c < channels; ++c) dst[c] = 0.0f;
        for (int q = lo; q <= hi; ++q) {
          const float w = blur_taps[std::abs(q - p)];
          const float* src = line.data() + static_cast<std::size_t>(q) * channels;
          for (int c = 0; c < channels; ++c) dst[c] += w * src[c];
        }
      }
    }
  }

  // Slice and subtract each pixel's exact self-weight, which factorizes
  // per axis over the splat/slice corner pairs.
  std::vector<float> out(n * channels, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    const float* fr = &frac[i * dims];
    for (int d = 0; d < dims; ++d) bspline_weights(fr[d], &wgt[d * 3]);
    float* o = out.data() + i * channels;
    for (int corner = 0; corner < corners; ++corner) {
      float w = 1.0f;
      std::size_t cell = base[i];
      for (int d = 0, rem = corner; d < dims; ++d, rem /= 3) {
        const int p = rem % 3;
        w *= wgt[d * 3 + p];
        cell += static_cast<std::size_t>(p) * g.stride[d];
      }
      const float* src = grid.data() + cell * channels;
      for (int c = 0; c < channels; ++c) o[c] += w * src[c];
    }
    float self = 1.0f;
    for (int d = 0; d < dims; ++d) {
      const float* w = &wgt[d * 3];
      self *= (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) * blur_taps[0] +
              2.0f * (w[0] * w[1] + w[1] * w[2]) * blur_taps[1] +
              2.0f * w[0] * w[2] * blur_taps[2];
    }
    const float* v = values.data() + i * channels;
    for (int c = 0; c < channels; ++c) o[c] -= self * v[c];
  }
  return out;
}

}  // namespace

std::vector<float> filter_fast(const std::vector<float>& values, int channels,
                               const FeatureField& scaled_features) {
  const std::size_t n = scaled_features.pixels();
  if (channels <= 0) throw ConfigError("filter: channels must be > 0");
  if (values.size() != n * channels) {
    throw ConfigError("filter: values size does not match pixels x channels");
  }
  if (n == 0) return {};
  if (n == 1) return std::vector<float>(channels, 0.0f);

  const SpatialScale sp = detect_spatial(scaled_features);
  if (sp.pure_spatial) {
    return separable_filter(values, channels, scaled_features.width,
                            scaled_features.height, sp.sigma_x, sp.sigma_y);
  }
  return grid_filter(values, channels, scaled_features);
}

}  // namespace crisp
