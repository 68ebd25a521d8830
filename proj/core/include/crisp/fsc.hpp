#ifndef CRISP_FSC_HPP
#define CRISP_FSC_HPP

#include <cstdint>
#include <vector>

#include "crisp/image.hpp"

namespace crisp {

struct FscShell {
  double frequency = 0.0;    // 1/Angstrom
  double correlation = 0.0;  // in [-1, 1]
  bool zero_energy = false;  // correlation forced to 0: no signal in shell
};

struct FscCurve {
  std::vector<FscShell> shells;  // radius 1 .. side/2; DC excluded
  float pixel_size = 1.0f;
};

// Fourier shell correlation between two equally sized cubic volumes:
// per integer-radius shell, Re(Σ F1·conj(F2)) / sqrt(Σ|F1|² · Σ|F2|²).
FscCurve fsc(const Volume3D& a, const Volume3D& b);

struct ResolutionEstimate {
  double resolution = 0.0;  // Angstrom
  bool crossed = false;     // false: curve never fell below the threshold
};

// Resolution at the first crossing below `threshold`, linearly interpolated
// between the straddling shells. A curve that never crosses reports the
// Nyquist resolution with crossed = false.
ResolutionEstimate resolution_at(const FscCurve& curve, double threshold = 0.143);

// Replaces the phase of every Fourier voxel beyond `beyond` (1/Angstrom)
// with a uniform random phase while keeping amplitudes and Hermitian
// symmetry, so the output stays real. beyond >= Nyquist returns the input
// unchanged.
Volume3D phase_randomize(const Volume3D& v, double beyond, std::uint64_t seed = 0);

}  // namespace crisp

#endif
