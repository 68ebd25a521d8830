#include "crisp/fsc.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "crisp/errors.hpp"
#include "crisp/rng.hpp"
#include "fft_internal.hpp"

namespace crisp {

namespace {

int wrapped_index(int k, int n) { return k <= n / 2 ? k : k - n; }

std::vector<std::complex<float>> forward(const Volume3D& v) {
  std::vector<std::complex<float>> in(v.data.size());
  for (std::size_t i = 0; i < v.data.size(); ++i) in[i] = v.data[i];
  std::vector<std::complex<float>> out(v.data.size());
  fft::forward_c2c_3d(v.side, in.data(), out.data());
  return out;
}

}  // namespace

FscCurve fsc(const Volume3D& a, const Volume3D& b) {
  if (a.side != b.side) throw ShapeError("fsc: volume sizes differ");
  if (a.side < 2) throw ConfigError("fsc: volume too small");
  if (a.pixel_size != b.pixel_size) throw ShapeError("fsc: pixel sizes differ");

  const int n = a.side;
  const std::vector<std::complex<float>> fa = forward(a);
  const std::vector<std::complex<float>> fb = forward(b);

  const int shells = n / 2;
  std::vector<double> cross(shells + 1, 0.0);
  std::vector<double> pa(shells + 1, 0.0), pb(shells + 1, 0.0);

  std::size_t i = 0;
  for (int z = 0; z < n; ++z) {
    const int kz = wrapped_index(z, n);
    for (int y = 0; y < n; ++y) {
      const int ky = wrapped_index(y, n);
      for (int x = 0; x < n; ++x, ++i) {
        const int kx = wrapped_index(x, n);
        const double r = std::sqrt(static_cast<double>(kx) * kx +
                                   static_cast<double>(ky) * ky +
                                   static_cast<double>(kz) * kz);
        const int shell = static_cast<int>(std::lround(r));
        if (shell < 1 || shell > shells) continue;
        const std::complex<double> va(fa[i].real(), fa[i].imag());
        const std::complex<double> vb(fb[i].real(), fb[i].imag());
        cross[shell] += (va * std::conj(vb)).real();
        pa[shell] += std::norm(va);
        pb[shell] += std::norm(vb);
      }
    }
  }

  FscCurve curve;
  curve.pixel_size = a.pixel_size;
  const double px = a.pixel_size > 0 ? a.pixel_size : 1.0;
  for (int s = 1; s <= shells; ++s) {
    FscShell shell;
    shell.frequency = static_cast<double>(s) / (n * px);
    const double denom = pa[s] * pb[s];
    if (denom > 0.0) {
      shell.correlation = cross[s] / std::sqrt(denom);
    } else {
      shell.correlation = 0.0;
      shell.zero_energy = true;
    }
    curve.shells.push_back(shell);
  }
  return curve;
}

ResolutionEstimate resolution_at(const FscCurve& curve, double threshold) {
  if (curve.shells.empty()) throw ConfigError("resolution_at: empty curve");
  ResolutionEstimate out;
  for (std::size_t i = 0; i < curve.shells.size(); ++i) {
    if (curve.shells[i].correlation < threshold) {
      double freq;
      if (i == 0) {
        freq = curve.shells[0].frequency;
      } else {
        const double f0 = curve.shells[i - 1].frequency;
        const double f1 = curve.shells[i].frequency;
        const double c0 = curve.shells[i - 1].correlation;
        const double c1 = curve.shells[i].correlation;
        freq = f0 + (f1 - f0) * (c0 - threshold) / (c0 - c1);
      }
      out.crossed = true;
      out.resolution = 1.0 / freq;
      return out;
    }
  }
  out.crossed = false;
  out.resolution = 1.0 / curve.shells.back().frequency;  // Nyquist
  return out;
}

Volume3D phase_randomize(const Volume3D& v, double beyond, std::uint64_t seed) {
  if (v.side < 2) throw ConfigError("phase_randomize: volume too small");
  const int n = v.side;
  const double px = v.pixel_size > 0 ? v.pixel_size : 1.0;
  const double nyquist = 1.0 / (2.0 * px);
  if (beyond >= nyquist) return v;  // nothing beyond the cutoff exists
  if (beyond < 0.0) throw ConfigError("phase_randomize: negative frequency");

  std::vector<std::complex<float>> spec = forward(v);
  std::mt19937_64 rng = make_rng(mix_seed(seed, 0x9e37u));
  std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);

  // Visit each Hermitian pair (i, conj_index(i)) once: randomize the phase
  // at i and force the conjugate at the mirror so the output stays real.
  auto mirror = [n](int k) { return k == 0 ? 0 : n - k; };
  std::size_t i = 0;
  for (int z = 0; z < n; ++z) {
    const int kz = wrapped_index(z, n);
    for (int y = 0; y < n; ++y) {
      const int ky = wrapped_index(y, n);
      for (int x = 0; x < n; ++x, ++i) {
        const int kx = wrapped_index(x, n);
        const double freq =
            std::sqrt(static_cast<double>(kx) * kx + static_cast<double>(ky) * ky +
                      static_cast<double>(kz) * kz) /
            (n * px);
        if (freq <= beyond) continue;

        const int mx = mirror(x), my = mirror(y), mz = mirror(z);
        const std::size_t j =
            (static_cast<std::size_t>(mz) * n + my) * n + mx;
        if (j < i) continue;  // already handled from the mirror side

        const float amp = std::abs(spec[i]);
        if (i == j) {
          // Self-conjugate voxel: the value must stay real; only the sign
          // is a free choice.
          const double phi = uni(rng);
          spec[i] = std::complex<float>(phi < std::numbers::pi ? amp : -amp, 0.0f);
        } else {
          const double phi = uni(rng);
          const std::complex<float> val(
              amp * static_cast<float>(std::cos(phi)),
              amp * static_cast<float>(std::sin(phi)));
          spec[i] = val;
          spec[j] = std::conj(val);
        }
      }
    }
  }

  std::vector<std::complex<float>> back(spec.size());
  fft::inverse_c2c_3d(n, spec.data(), back.data());
  Volume3D out(n, v.pixel_size);
  for (std::size_t k = 0; k < back.size(); ++k) out.data[k] = back[k].real();
  return out;
}

}  // namespace crisp
