#include "fft_internal.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace crisp::fft {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void forward_r2c_2d(int w, int h, const float* in, std::complex<float>* out) {
  std::vector<float> scratch(in, in + static_cast<std::size_t>(w) * h);
  fftwf_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftwf_plan_dft_r2c_2d(h, w, scratch.data(),
                                 reinterpret_cast<fftwf_complex*>(out), FFTW_ESTIMATE);
  }
  fftwf_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftwf_destroy_plan(plan);
}

void inverse_c2r_2d(int w, int h, const std::complex<float>* in, float* out) {
  const std::size_t bins = static_cast<std::size_t>(w / 2 + 1) * h;
  std::vector<std::complex<float>> scratch(in, in + bins);  // c2r destroys input
  fftwf_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftwf_plan_dft_c2r_2d(h, w, reinterpret_cast<fftwf_complex*>(scratch.data()),
                                 out, FFTW_ESTIMATE);
  }
  fftwf_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftwf_destroy_plan(plan);
  }
  const float scale = 1.0f / (static_cast<float>(w) * static_cast<float>(h));
  const std::size_t n = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

namespace {

void c2c_3d(int side, const std::complex<float>* in, std::complex<float>* out, int sign) {
  std::vector<std::complex<float>> scratch(in, in + static_cast<std::size_t>(side) *
                                                       side * side);
  fftwf_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftwf_plan_dft_3d(side, side, side,
                             reinterpret_cast<fftwf_complex*>(scratch.data()),
                             reinterpret_cast<fftwf_complex*>(out), sign, FFTW_ESTIMATE);
  }
  fftwf_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftwf_destroy_plan(plan);
}

}  // namespace

void forward_c2c_3d(int side, const std::complex<float>* in, std::complex<float>* out) {
  c2c_3d(side, in, out, FFTW_FORWARD);
}

void inverse_c2c_3d(int side, const std::complex<float>* in, std::complex<float>* out) {
  c2c_3d(side, in, out, FFTW_BACKWARD);
  const std::size_t n = static_cast<std::size_t>(side) * side * side;
  const float scale = 1.0f / static_cast<float>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace crisp::fft
