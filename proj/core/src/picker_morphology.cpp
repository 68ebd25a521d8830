#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "crisp/errors.hpp"
#include "crisp/picker.hpp"

namespace crisp {

namespace {

// Grayscale erosion: separable min filter with a side x side square window.
std::vector<float> min_filter(const std::vector<float>& in, int w, int h, int side) {
  if (side <= 1) return in;
  const int lo = -(side - 1) / 2;
  const int hi = side / 2;
  std::vector<float> tmp(in.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float m = in[static_cast<std::size_t>(y) * w + x];
      for (int d = lo; d <= hi; ++d) {
        const int xx = x + d;
        if (xx < 0 || xx >= w) continue;
        m = std::min(m, in[static_cast<std::size_t>(y) * w + xx]);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = m;
    }
  }
  std::vector<float> out(in.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float m = tmp[static_cast<std::size_t>(y) * w + x];
      for (int d = lo; d <= hi; ++d) {
        const int yy = y + d;
        if (yy < 0 || yy >= h) continue;
        m = std::min(m, tmp[static_cast<std::size_t>(yy) * w + x]);
      }
      out[static_cast<std::size_t>(y) * w + x] = m;
    }
  }
  return out;
}

struct Point {
  float x, y;
};

struct Circle {
  double cx = 0, cy = 0, r = -1;

  bool contains(const Point& p, double slack = 1e-7) const {
    const double dx = p.x - cx, dy = p.y - cy;
    return std::sqrt(dx * dx + dy * dy) <= r + slack;
  }
};

Circle circle2(const Point& a, const Point& b) {
  Circle c;
  c.cx = 0.5 * (a.x + b.x);
  c.cy = 0.5 * (a.y + b.y);
  const double dx = a.x - c.cx, dy = a.y - c.cy;
  c.r = std::sqrt(dx * dx + dy * dy);
  return c;
}

Circle circle3(const Point& a, const Point& b, const Point& c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-12) {
    // Collinear: fall back to the widest pair.
    Circle best = circle2(a, b);
    for (const Circle& cand : {circle2(a, c), circle2(b, c)}) {
      if (cand.r > best.r) best = cand;
    }
    return best;
  }
  const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
  const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
  Circle out;
  out.cx = a.x + ux;
  out.cy = a.y + uy;
  out.r = std::sqrt(ux * ux + uy * uy);
  return out;
}

// Welzl's move-to-front algorithm on the component boundary points.
Circle min_enclosing_circle(std::vector<Point> pts) {
  if (pts.empty()) return {};
  if (pts.size() == 1) return Circle{pts[0].x, pts[0].y, 0.0};
  // Deterministic shuffle keeps the expected-linear behavior reproducible.
  std::uint64_t state = 0x2545f4914f6cdd1dull;
  for (std::size_t i = pts.size() - 1; i > 0; --i) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    std::swap(pts[i], pts[state % (i + 1)]);
  }
  Circle c = circle2(pts[0], pts[1]);
  for (std::size_t i = 2; i < pts.size(); ++i) {
    if (c.contains(pts[i])) continue;
    c = circle2(pts[i], pts[0]);
    for (std::size_t j = 1; j < i; ++j) {
      if (c.contains(pts[j])) continue;
      c = circle2(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!c.contains(pts[k])) c = circle3(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

}  // namespace

PickSet pick_morphology(const ProbabilityMap& map, float radius, float e, float s) {
  if (!(radius >= 2.0f)) throw ConfigError("pick_morphology: radius must be >= 2");
  if (!(e > 0.0f) || !(s > 0.0f)) throw ConfigError("pick_morphology: e and s must be > 0");
  const int w = map.width(), h = map.height();
  PickSet out;
  out.box_width = 2.0f * radius;
  out.box_height = 2.0f * radius;
  if (w <= 0 || h <= 0) return out;

  float lo = map.map.data[0], hi = map.map.data[0];
  for (float v : map.map.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) return out;  // flat map, nothing to pick
  std::vector<float> norm(map.map.data.size());
  const float inv = 1.0f / (hi - lo);
  for (std::size_t i = 0; i < norm.size(); ++i) norm[i] = (map.map.data[i] - lo) * inv;

  std::vector<float> eroded = min_filter(norm, w, h, static_cast<int>(radius / 4.0f));
  eroded = min_filter(eroded, w, h, static_cast<int>(radius / e));

  // Connected components (8-neighborhood) of the eroded foreground.
  std::vector<std::int32_t> comp(norm.size(), -1);
  std::vector<std::size_t> stack;
  std::int32_t num_comps = 0;
  const double min_area = std::pow(static_cast<double>(radius), static_cast<double>(s));
  const double max_area = 500000.0;

  for (std::size_t seed = 0; seed < comp.size(); ++seed) {
    if (comp[seed] >= 0 || eroded[seed] <= 0.5f) continue;
    const std::int32_t id = num_comps++;
    comp[seed] = id;
    stack.assign(1, seed);
    std::vector<std::size_t> members;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      members.push_back(p);
      const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy) continue;
          const int nx = px + dx, ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (comp[q] >= 0 || eroded[q] <= 0.5f) continue;
          comp[q] = id;
          stack.push_back(q);
        }
      }
    }

    const double area = static_cast<double>(members.size());
    if (area < min_area || area > max_area) continue;

    // Boundary pixels are enough for the minimal enclosing circle.
    std::vector<Point> boundary;
    for (std::size_t p : members) {
      const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
      bool edge = px == 0 || py == 0 || px == w - 1 || py == h - 1;
      if (!edge) {
        for (int dy = -1; dy <= 1 && !edge; ++dy) {
          for (int dx = -1; dx <= 1 && !edge; ++dx) {
            if (!dx && !dy) continue;
            const std::size_t q = static_cast<std::size_t>(py + dy) * w + (px + dx);
            if (comp[q] != id) edge = true;
          }
        }
      }
      if (edge) boundary.push_back(Point{static_cast<float>(px), static_cast<float>(py)});
    }
    const Circle circle = min_enclosing_circle(std::move(boundary));
    if (circle.r < 0.5 * radius || circle.r > 2.0 * radius) continue;

    double score = 0.0;
    for (std::size_t p : members) score += norm[p];
    out.centers.push_back(Center{
        std::clamp(static_cast<float>(circle.cx), 0.0f, static_cast<float>(w - 1)),
        std::clamp(static_cast<float>(circle.cy), 0.0f, static_cast<float>(h - 1)),
        static_cast<float>(score)});
  }
  return out;
}

}  // namespace crisp
