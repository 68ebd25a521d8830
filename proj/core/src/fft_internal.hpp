#ifndef CRISP_FFT_INTERNAL_HPP
#define CRISP_FFT_INTERNAL_HPP

#include <complex>

namespace crisp::fft {

// Thin FFTW wrappers. Plan creation/destruction is serialized internally
// (FFTW planning is not thread-safe); execution is concurrent-safe because
// every call owns its plan and buffers.

// 2D real-to-complex; out holds h rows of (w/2 + 1) complex bins.
void forward_r2c_2d(int w, int h, const float* in, std::complex<float>* out);

// Inverse of the above, normalized by 1/(w*h).
void inverse_c2r_2d(int w, int h, const std::complex<float>* in, float* out);

// 3D complex transforms over side^3 grids, x fastest. The inverse is
// normalized by 1/side^3.
void forward_c2c_3d(int side, const std::complex<float>* in, std::complex<float>* out);
void inverse_c2c_3d(int side, const std::complex<float>* in, std::complex<float>* out);

}  // namespace crisp::fft

#endif
