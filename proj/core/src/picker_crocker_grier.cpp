#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "crisp/errors.hpp"
#include "crisp/picker.hpp"

namespace crisp {

namespace {

struct Resized {
  int w = 0, h = 0;
  std::vector<float> data;
  double ratio_x = 1.0, ratio_y = 1.0;  // original px per resized px
};

Resized resize_bilinear(const ProbabilityMap& map, float factor) {
  Resized r;
  r.w = std::max(1, static_cast<int>(std::lround(map.width() * factor)));
  r.h = std::max(1, static_cast<int>(std::lround(map.height() * factor)));
  r.ratio_x = static_cast<double>(map.width()) / r.w;
  r.ratio_y = static_cast<double>(map.height()) / r.h;
  r.data.resize(static_cast<std::size_t>(r.w) * r.h);
  for (int y = 0; y < r.h; ++y) {
    const double sy = (y + 0.5) * r.ratio_y - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    const double fy = sy - y0;
    const int ya = std::clamp(y0, 0, map.height() - 1);
    const int yb = std::clamp(y0 + 1, 0, map.height() - 1);
    for (int x = 0; x < r.w; ++x) {
      const double sx = (x + 0.5) * r.ratio_x - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const double fx = sx - x0;
      const int xa = std::clamp(x0, 0, map.width() - 1);
      const int xb = std::clamp(x0 + 1, 0, map.width() - 1);
      const double v = (1 - fy) * ((1 - fx) * map.at(xa, ya) + fx * map.at(xb, ya)) +
                       fy * ((1 - fx) * map.at(xa, yb) + fx * map.at(xb, yb));
      r.data[static_cast<std::size_t>(y) * r.w + x] = static_cast<float>(v);
    }
  }
  return r;
}

struct Blob {
  double x, y;   // resized-space centroid
  double mass;
};

}  // namespace

PickSet pick_crocker_grier(const ProbabilityMap& map, float diameter, float e, float s) {
  if (!(diameter >= 3.0f)) throw ConfigError("pick_crocker_grier: diameter must be >= 3");
  if (!(e > 0.0f) || !(s > 0.0f)) {
    throw ConfigError("pick_crocker_grier: e and s must be > 0");
  }
  PickSet out;
  out.box_width = diameter;
  out.box_height = diameter;
  if (map.width() <= 0 || map.height() <= 0) return out;

  const Resized r = resize_bilinear(map, e);
  const std::size_t n = r.data.size();

  double sum = 0.0;
  for (float v : r.data) sum += v;
  const double mean = sum / n;
  double var = 0.0;
  for (float v : r.data) {
    const double d = v - mean;
    var += d * d;
  }
  const double threshold = mean + std::sqrt(var / n);

  // Window radius in resized pixels, from the expected particle size.
  const int win = std::max(1, static_cast<int>(std::lround(diameter * e * 0.5)));

  std::vector<Blob> blobs;
  for (int y = 0; y < r.h; ++y) {
    for (int x = 0; x < r.w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * r.w + x;
      const float v = r.data[i];
      if (!(v > threshold)) continue;
      bool is_max = true;
      for (int dy = -win; dy <= win && is_max; ++dy) {
        for (int dx = -win; dx <= win && is_max; ++dx) {
          if (!dx && !dy) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= r.w || yy >= r.h) continue;
          const std::size_t j = static_cast<std::size_t>(yy) * r.w + xx;
          // Strictly greater wins; an equal value wins on lower index.
          if (r.data[j] > v || (r.data[j] == v && j < i)) is_max = false;
        }
      }
      if (!is_max) continue;

      // Intensity-weighted centroid and mass over the window.
      double m = 0.0, mx = 0.0, my = 0.0;
      for (int dy = -win; dy <= win; ++dy) {
        for (int dx = -win; dx <= win; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= r.w || yy >= r.h) continue;
          const double val = r.data[static_cast<std::size_t>(yy) * r.w + xx];
          m += val;
          mx += xx * val;
          my += yy * val;
        }
      }
      if (!(m > 0.0)) continue;
      blobs.push_back(Blob{mx / m, my / m, m});
    }
  }

  // Mass-descending greedy duplicate removal in original coordinates.
  std::vector<std::size_t> order(blobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return blobs[a].mass > blobs[b].mass;
  });
  const double min_dist = static_cast<double>(diameter) * s;
  std::vector<Center> kept;
  for (std::size_t oi : order) {
    const double ox = (blobs[oi].x + 0.5) * r.ratio_x - 0.5;
    const double oy = (blobs[oi].y + 0.5) * r.ratio_y - 0.5;
    bool ok = true;
    for (const Center& c : kept) {
      const double dx = c.x - ox, dy = c.y - oy;
      if (std::sqrt(dx * dx + dy * dy) < min_dist) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    kept.push_back(Center{
        std::clamp(static_cast<float>(ox), 0.0f, static_cast<float>(map.width() - 1)),
        std::clamp(static_cast<float>(oy), 0.0f, static_cast<float>(map.height() - 1)),
        static_cast<float>(blobs[oi].mass)});
  }
  out.centers = std::move(kept);
  return out;
}

}  // namespace crisp
