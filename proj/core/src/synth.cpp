#include "crisp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "crisp/errors.hpp"
#include "crisp/rng.hpp"
#include "fft_internal.hpp"

namespace crisp {

float Orientation::norm() const {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

Orientation sample_orientation(std::mt19937_64& rng) {
  // Shoemake's subgroup method: uniform over the unit quaternions.
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u1 = uni(rng), u2 = uni(rng), u3 = uni(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t2 = 2.0 * std::numbers::pi * u2;
  const double t3 = 2.0 * std::numbers::pi * u3;
  Orientation o;
  o.x = static_cast<float>(a * std::sin(t2));
  o.y = static_cast<float>(a * std::cos(t2));
  o.z = static_cast<float>(b * std::sin(t3));
  o.w = static_cast<float>(b * std::cos(t3));
  return o;
}

std::array<float, 9> rotation_matrix(const Orientation& o) {
  const float n = o.norm();
  if (!(std::abs(n - 1.0f) <= 1e-5f)) {
    throw NumericalError("orientation quaternion is not unit length");
  }
  const float w = o.w, x = o.x, y = o.y, z = o.z;
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

namespace {

float sample_trilinear(const Volume3D& vol, float px, float py, float pz) {
  const int x0 = static_cast<int>(std::floor(px));
  const int y0 = static_cast<int>(std::floor(py));
  const int z0 = static_cast<int>(std::floor(pz));
  const float fx = px - x0, fy = py - y0, fz = pz - z0;
  float acc = 0.0f;
  for (int dz = 0; dz <= 1; ++dz) {
    const int z = z0 + dz;
    if (z < 0 || z >= vol.side) continue;
    const float wz = dz ? fz : 1.0f - fz;
    for (int dy = 0; dy <= 1; ++dy) {
      const int y = y0 + dy;
      if (y < 0 || y >= vol.side) continue;
      const float wy = dy ? fy : 1.0f - fy;
      for (int dx = 0; dx <= 1; ++dx) {
        const int x = x0 + dx;
        if (x < 0 || x >= vol.side) continue;
        const float wx = dx ? fx : 1.0f - fx;
        acc += wz * wy * wx * vol.at(x, y, z);
      }
    }
  }
  return acc;
}

}  // namespace

Image2D project_volume(const Volume3D& vol, const Orientation& o) {
  if (vol.side <= 0) throw ConfigError("project_volume: empty volume");
  const std::array<float, 9> r = rotation_matrix(o);
  const int side = vol.side;
  const float c = (side - 1) * 0.5f;
  Image2D out(side, side, vol.pixel_size);
  // The rotated volume V'(q) = V(R^T (q - c) + c); integrate V' along z.
  for (int y = 0; y < side; ++y) {
    const float qy = y - c;
    for (int x = 0; x < side; ++x) {
      const float qx = x - c;
      double acc = 0.0;
      for (int z = 0; z < side; ++z) {
        const float qz = z - c;
        const float sx = r[0] * qx + r[3] * qy + r[6] * qz + c;
        const float sy = r[1] * qx + r[4] * qy + r[7] * qz + c;
        const float sz = r[2] * qx + r[5] * qy + r[8] * qz + c;
        acc += sample_trilinear(vol, sx, sy, sz);
      }
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

float electron_wavelength(float voltage_kv) {
  if (!(voltage_kv > 0.0f)) throw ConfigError("voltage must be positive");
  const double v = voltage_kv * 1000.0;
  return static_cast<float>(12.2639 / std::sqrt(v + 0.97845e-6 * v * v));
}

float ctf_value(const CtfParams& p, float s) {
  const double lambda = electron_wavelength(p.voltage_kv);
  const double df = p.defocus_um * 1e4;  // um -> Angstrom
  const double cs = p.cs_mm * 1e7;       // mm -> Angstrom
  const double a = std::clamp<double>(p.amplitude_contrast, -1.0, 1.0);
  const double s2 = static_cast<double>(s) * s;
  const double chi = std::numbers::pi * lambda * df * s2 -
                     0.5 * std::numbers::pi * lambda * lambda * lambda * cs * s2 * s2 +
                     std::asin(a);
  return static_cast<float>(std::sin(chi));
}

Image2D apply_ctf(const Image2D& img, const CtfParams& p) {
  const int w = img.width, h = img.height;
  if (w <= 0 || h <= 0) throw ConfigError("apply_ctf: empty image");
  if (w % 2 != 0 || h % 2 != 0) {
    throw ShapeError("apply_ctf requires even dimensions, got " + std::to_string(w) +
                     "x" + std::to_string(h));
  }
  const int half = w / 2 + 1;
  std::vector<std::complex<float>> spec(static_cast<std::size_t>(half) * h);
  fft::forward_r2c_2d(w, h, img.data.data(), spec.data());

  const float px = img.pixel_size > 0 ? img.pixel_size : 1.0f;
  for (int ky = 0; ky < h; ++ky) {
    const int wy = ky <= h / 2 ? ky : ky - h;  // wrapped frequency index
    const float fy = static_cast<float>(wy) / (h * px);
    for (int kx = 0; kx < half; ++kx) {
      const float fx = static_cast<float>(kx) / (w * px);
      const float s = std::sqrt(fx * fx + fy * fy);
      spec[static_cast<std::size_t>(ky) * half + kx] *= ctf_value(p, s);
    }
  }

  Image2D out(w, h, img.pixel_size);
  fft::inverse_c2r_2d(w, h, spec.data(), out.data.data());
  return out;
}

std::pair<Image2D, std::vector<Center>> compose_micrograph(
    const std::vector<Image2D>& projections, const std::vector<Center>& positions,
    int canvas_width, int canvas_height, float pixel_size) {
  if (projections.size() != positions.size()) {
    throw ConfigError("compose_micrograph: projection/position count mismatch");
  }
  Image2D canvas(canvas_width, canvas_height, pixel_size);
  std::vector<Center> realized;
  realized.reserve(projections.size());
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const Image2D& proj = projections[i];
    const int left = static_cast<int>(std::lround(positions[i].x - (proj.width - 1) * 0.5));
    const int top = static_cast<int>(std::lround(positions[i].y - (proj.height - 1) * 0.5));
    if (left < 0 || top < 0 || left + proj.width > canvas_width ||
        top + proj.height > canvas_height) {
      throw ConfigError("compose_micrograph: placement " + std::to_string(i) +
                        " out of bounds");
    }
    for (int y = 0; y < proj.height; ++y) {
      for (int x = 0; x < proj.width; ++x) {
        canvas.at(left + x, top + y) += proj.at(x, y);
      }
    }
    realized.push_back(Center{left + (proj.width - 1) * 0.5f,
                              top + (proj.height - 1) * 0.5f, positions[i].score});
  }
  return {std::move(canvas), std::move(realized)};
}

Image2D add_noise_to_snr(const Image2D& clean, float snr, std::mt19937_64& rng) {
  if (!(snr > 0.0f)) throw ConfigError("snr must be positive");
  if (clean.data.empty()) throw ConfigError("add_noise_to_snr: empty image");
  double sum = 0.0;
  for (float v : clean.data) sum += v;
  const double mean = sum / clean.data.size();
  double var = 0.0;
  for (float v : clean.data) {
    const double d = v - mean;
    var += d * d;
  }
  var /= clean.data.size();
  if (var <= 0.0) throw NumericalError("add_noise_to_snr: zero-variance input");

  const double sigma = std::sqrt(var / snr);
  std::normal_distribution<double> gauss(0.0, sigma);
  Image2D out(clean.width, clean.height, clean.pixel_size);
  for (std::size_t i = 0; i < clean.data.size(); ++i) {
    out.data[i] = static_cast<float>(clean.data[i] + gauss(rng));
  }
  return out;
}

float li_threshold(const Image2D& img) {
  if (img.data.empty()) throw ConfigError("li_threshold: empty image");
  float lo = img.data[0], hi = img.data[0];
  for (float v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) throw NumericalError("li_threshold: constant image");

  // Work on values shifted to a strictly positive range; the iteration
  // needs log of the class means.
  const double range = static_cast<double>(hi) - lo;
  const double eps = range * 1e-6;
  const auto shifted = [&](float v) { return static_cast<double>(v) - lo + eps; };

  double t = 0.0;
  for (float v : img.data) t += shifted(v);
  t /= img.data.size();

  const double tol = range * 1e-7;
  for (int iter = 0; iter < 256; ++iter) {
    double sum0 = 0.0, sum1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (float v : img.data) {
      const double s = shifted(v);
      if (s <= t) {
        sum0 += s;
        ++n0;
      } else {
        sum1 += s;
        ++n1;
      }
    }
    if (n0 == 0 || n1 == 0) break;  // degenerate split; keep current t
    const double m0 = sum0 / n0, m1 = sum1 / n1;
    const double next = (m1 - m0) / (std::log(m1) - std::log(m0));
    if (std::abs(next - t) < tol) {
      t = next;
      break;
    }
    t = next;
  }
  return static_cast<float>(t - eps + lo);
}

LabelMask place_labels(const std::vector<LabelMask>& particle_masks,
                       const std::vector<Center>& coords, int canvas_width,
                       int canvas_height) {
  if (particle_masks.size() != coords.size()) {
    throw ConfigError("place_labels: mask/coordinate count mismatch");
  }
  LabelMask canvas(canvas_width, canvas_height, 2);
  for (std::size_t i = 0; i < particle_masks.size(); ++i) {
    const LabelMask& m = particle_masks[i];
    const int left = static_cast<int>(std::lround(coords[i].x - (m.width - 1) * 0.5));
    const int top = static_cast<int>(std::lround(coords[i].y - (m.height - 1) * 0.5));
    if (left < 0 || top < 0 || left + m.width > canvas_width ||
        top + m.height > canvas_height) {
      throw ConfigError("place_labels: placement " + std::to_string(i) + " out of bounds");
    }
    for (int y = 0; y < m.height; ++y) {
      for (int x = 0; x < m.width; ++x) {
        if (m.at(x, y)) canvas.at(left + x, top + y) = 1;
      }
    }
  }
  return canvas;
}

SyntheticMicrograph make_micrograph(const Volume3D& vol, const SynthConfig& cfg,
                                    std::uint64_t index) {
  if (vol.side <= 0) throw ConfigError("make_micrograph: empty volume");
  if (cfg.particles < 1) throw ConfigError("particle count must be >= 1");
  if (!(cfg.snr > 0.0f)) throw ConfigError("snr must be positive");
  if (cfg.defocus_pool_um.empty()) throw ConfigError("defocus pool is empty");
  const int size = cfg.micrograph_size;
  if (size < vol.side) throw ConfigError("micrograph smaller than one projection");

  std::mt19937_64 rng = make_rng(mix_seed(cfg.seed, index));

  std::uniform_int_distribution<std::size_t> pick_df(0, cfg.defocus_pool_um.size() - 1);
  const float defocus = cfg.defocus_pool_um[pick_df(rng)];
  CtfParams ctf = cfg.ctf;
  ctf.defocus_um = defocus;

  // Rejection-sample centers on the (left, top) integer grid so every
  // footprint fits; separation defaults to one projection side.
  const float min_sep = cfg.min_separation > 0 ? static_cast<float>(cfg.min_separation)
                                               : static_cast<float>(vol.side);
  std::uniform_int_distribution<int> pick_pos(0, size - vol.side);
  std::vector<Center> positions;
  positions.reserve(cfg.particles);
  const int max_tries = cfg.particles * 1000;
  int tries = 0;
  while (static_cast<int>(positions.size()) < cfg.particles) {
    if (++tries > max_tries) {
      throw ConfigError("cannot place " + std::to_string(cfg.particles) +
                        " particles with separation " + std::to_string(min_sep));
    }
    const float cx = pick_pos(rng) + (vol.side - 1) * 0.5f;
    const float cy = pick_pos(rng) + (vol.side - 1) * 0.5f;
    bool ok = true;
    for (const Center& c : positions) {
      const float dx = c.x - cx, dy = c.y - cy;
      if (dx * dx + dy * dy < min_sep * min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) positions.push_back(Center{cx, cy, 1.0f});
  }

  std::vector<Image2D> projections;
  std::vector<LabelMask> masks;
  projections.reserve(cfg.particles);
  masks.reserve(cfg.particles);
  for (int p = 0; p < cfg.particles; ++p) {
    const Orientation o = sample_orientation(rng);
    Image2D proj = project_volume(vol, o);
    // Labels come from the clean projection; CTF corruption happens after.
    const float t = li_threshold(proj);
    LabelMask mask(proj.width, proj.height, 2);
    for (std::size_t i = 0; i < proj.data.size(); ++i) {
      mask.labels[i] = proj.data[i] > t ? 1 : 0;
    }
    masks.push_back(std::move(mask));
    projections.push_back(cfg.apply_ctf ? crisp::apply_ctf(proj, ctf) : std::move(proj));
  }

  SyntheticMicrograph out;
  auto [clean, centers] =
      compose_micrograph(projections, positions, size, size, vol.pixel_size);
  out.labels = place_labels(masks, positions, size, size);
  out.centers = std::move(centers);
  out.micrograph = add_noise_to_snr(clean, cfg.snr, rng);
  out.clean = std::move(clean);
  out.defocus_um = defocus;
  return out;
}

}  // namespace crisp
