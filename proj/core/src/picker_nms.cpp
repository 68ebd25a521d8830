#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "crisp/errors.hpp"
#include "crisp/picker.hpp"

namespace crisp {

namespace {

// Gaussian-weighted window sum, separable: score(x,y) = sum W(i)W(j) P(x+i, y+j).
std::vector<float> window_score(const ProbabilityMap& map, int radius, float sigma) {
  const int w = map.width(), h = map.height();
  std::vector<float> taps(radius + 1);
  for (int d = 0; d <= radius; ++d) {
    taps[d] = std::exp(-0.5f * (d / sigma) * (d / sigma));
  }
  std::vector<float> tmp(map.map.data.size(), 0.0f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      const int lo = std::max(0, x - radius), hi = std::min(w - 1, x + radius);
      for (int xx = lo; xx <= hi; ++xx) {
        acc += taps[std::abs(xx - x)] * map.at(xx, y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
    }
  }
  std::vector<float> score(tmp.size(), 0.0f);
  for (int y = 0; y < h; ++y) {
    const int lo = std::max(0, y - radius), hi = std::min(h - 1, y + radius);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int yy = lo; yy <= hi; ++yy) {
        acc += taps[std::abs(yy - y)] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      score[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
    }
  }
  return score;
}

}  // namespace

PickSet pick_nms(const ProbabilityMap& map, float diameter, float e, float s) {
  if (!(diameter >= 3.0f)) throw ConfigError("pick_nms: diameter must be >= 3");
  if (!(e > 0.0f) || !(s > 0.0f)) throw ConfigError("pick_nms: e and s must be > 0");
  PickSet out;
  out.box_width = diameter;
  out.box_height = diameter;
  const int w = map.width(), h = map.height();
  if (w <= 0 || h <= 0) return out;

  const int radius = std::max(1, static_cast<int>(diameter) / 2);
  const std::vector<float> score = window_score(map, radius, diameter / 6.0f);

  // One candidate per grid cell: the cell's best score, if positive.
  const int cell = std::max(1, static_cast<int>(diameter * e));
  std::vector<std::size_t> candidates;
  for (int ty = 0; ty < h; ty += cell) {
    for (int tx = 0; tx < w; tx += cell) {
      std::size_t best = 0;
      float best_v = 0.0f;
      bool found = false;
      for (int y = ty; y < std::min(h, ty + cell); ++y) {
        for (int x = tx; x < std::min(w, tx + cell); ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          if (score[i] > best_v) {
            best_v = score[i];
            best = i;
            found = true;
          }
        }
      }
      if (found) candidates.push_back(best);
    }
  }

  // Hill-climb each candidate within a cell-sized window until stable.
  const int climb = std::max(1, cell / 2);
  for (std::size_t& cand : candidates) {
    for (int step = 0; step < 256; ++step) {
      const int cx = static_cast<int>(cand % w), cy = static_cast<int>(cand / w);
      std::size_t best = cand;
      float best_v = score[cand];
      for (int dy = -climb; dy <= climb; ++dy) {
        for (int dx = -climb; dx <= climb; ++dx) {
          const int xx = cx + dx, yy = cy + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const std::size_t i = static_cast<std::size_t>(yy) * w + xx;
          if (score[i] > best_v || (score[i] == best_v && i < best)) {
            best_v = score[i];
            best = i;
          }
        }
      }
      if (best == cand) break;
      cand = best;
    }
  }

  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Keep the higher scorer of any pair closer than diameter * s.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[candidates[a]] > score[candidates[b]];
  });
  const double min_dist = static_cast<double>(diameter) * s;
  for (std::size_t oi : order) {
    const std::size_t i = candidates[oi];
    const float x = static_cast<float>(i % w), y = static_cast<float>(i / w);
    bool ok = true;
    for (const Center& c : out.centers) {
      const double dx = c.x - x, dy = c.y - y;
      if (std::sqrt(dx * dx + dy * dy) < min_dist) {
        ok = false;
        break;
      }
    }
    if (ok) out.centers.push_back(Center{x, y, score[i]});
  }
  return out;
}

}  // namespace crisp
