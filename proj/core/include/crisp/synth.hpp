#ifndef CRISP_SYNTH_HPP
#define CRISP_SYNTH_HPP

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "crisp/image.hpp"

namespace crisp {

// Unit quaternion (w, x, y, z) describing a rotation of R^3.
struct Orientation {
  float w = 1.0f, x = 0.0f, y = 0.0f, z = 0.0f;

  float norm() const;
};

// Uniform rotation from SO(3) via uniform unit quaternions.
Orientation sample_orientation(std::mt19937_64& rng);

// Row-major 3x3 rotation matrix of the quaternion.
std::array<float, 9> rotation_matrix(const Orientation& o);

// Rotates the volume about its center (trilinear interpolation, zero
// outside) and integrates along z. Output is side x side with the volume
// pixel size.
Image2D project_volume(const Volume3D& vol, const Orientation& o);

struct CtfParams {
  float defocus_um = 1.5f;          // underfocus positive
  float voltage_kv = 300.0f;        // sets the electron wavelength
  float cs_mm = 2.7f;               // spherical aberration
  float amplitude_contrast = 0.1f;  // enters as a phase shift asin(A)
};

// Electron wavelength in Angstrom for an accelerating voltage in kV.
float electron_wavelength(float voltage_kv);

// Value of the phase-contrast transfer function at spatial frequency s
// (1/Angstrom): sin(pi*lambda*df*s^2 - (pi/2)*lambda^3*Cs*s^4 + asin(A)).
float ctf_value(const CtfParams& p, float s);

// Multiplies the image by the radially symmetric CTF in the frequency
// domain. Dimensions must be even.
Image2D apply_ctf(const Image2D& img, const CtfParams& p);

// Places projections additively onto a zero canvas at the given centers.
// A projection of width w placed at center cx occupies columns
// [round(cx - (w-1)/2), ...); any footprint outside the canvas is an error.
// Returns the clean micrograph and the realized center list.
std::pair<Image2D, std::vector<Center>> compose_micrograph(
    const std::vector<Image2D>& projections, const std::vector<Center>& positions,
    int canvas_width, int canvas_height, float pixel_size = 1.0f);

// Adds i.i.d. Gaussian noise with variance var(clean)/snr.
Image2D add_noise_to_snr(const Image2D& clean, float snr, std::mt19937_64& rng);

// Li's iterative minimum cross-entropy threshold. Values are shifted so the
// minimum maps to zero before iterating (the objective needs positive class
// means); the returned threshold is in the original value range.
float li_threshold(const Image2D& img);

// ORs binary masks onto a zero canvas at the given centers.
LabelMask place_labels(const std::vector<LabelMask>& particle_masks,
                       const std::vector<Center>& coords, int canvas_width,
                       int canvas_height);

struct SynthConfig {
  int micrograph_size = 1024;
  int particles = 100;
  float snr = 0.005f;
  std::vector<float> defocus_pool_um = {1.0f, 1.5f, 2.0f, 2.5f};
  CtfParams ctf;          // defocus_um is overridden from the pool
  bool apply_ctf = true;
  int min_separation = 0; // minimum center distance in pixels, 0 = auto
  std::uint64_t seed = 0;
};

struct SyntheticMicrograph {
  Image2D micrograph;   // noisy
  Image2D clean;        // before noise
  LabelMask labels;
  std::vector<Center> centers;
  float defocus_um = 0.0f;
};

// Full generator for one micrograph: sample orientations, project, apply
// a pool-sampled CTF per micrograph, place without touching the canvas
// border, label via Li threshold of each clean projection, add noise.
// Deterministic in (config.seed, index).
SyntheticMicrograph make_micrograph(const Volume3D& vol, const SynthConfig& cfg,
                                    std::uint64_t index);

}  // namespace crisp

#endif
