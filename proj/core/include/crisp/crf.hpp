#ifndef CRISP_CRF_HPP
#define CRISP_CRF_HPP

#include <vector>

#include "crisp/image.hpp"

namespace crisp {

// Per-pixel feature vectors backing the pairwise kernels. dim == 1 with raw
// intensity gives the classic bilateral appearance term; dim > 1 carries a
// learned/discriminative feature map instead.
struct FeatureField {
  int width = 0;
  int height = 0;
  int dim = 0;
  std::vector<float> data;  // data[pixel * dim + d]

  FeatureField() = default;
  FeatureField(int w, int h, int d);

  float* at(int pixel) { return data.data() + static_cast<std::size_t>(pixel) * dim; }
  const float* at(int pixel) const {
    return data.data() + static_cast<std::size_t>(pixel) * dim;
  }
  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
};

enum class KernelKind { appearance, smoothness };

// One pairwise Gaussian kernel. Appearance couples position (bandwidth
// spatial_bw, the usual alpha) with range features (range_bw, beta);
// smoothness is position-only (spatial_bw = gamma). class_weights holds
// w_m[c], one entry per class.
struct KernelSpec {
  KernelKind kind = KernelKind::smoothness;
  float spatial_bw = 3.0f;
  float range_bw = 13.0f;
  std::vector<float> class_weights;

  static KernelSpec appearance(float alpha, float beta, float weight, int num_classes);
  static KernelSpec smoothness(float gamma, float weight, int num_classes);
};

struct DenseCrfProblem {
  int width = 0;
  int height = 0;
  int num_classes = 2;
  std::vector<float> unary;  // unary[pixel * num_classes + c]
  std::vector<KernelSpec> kernels;
  FeatureField features;  // range features; may be empty when only smoothness kernels
  float w0 = 1.0f;        // Potts compatibility scale

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
  void validate() const;
};

// Per-pixel class distributions; rows sum to 1.
struct Marginals {
  int width = 0;
  int height = 0;
  int num_classes = 2;
  std::vector<float> q;  // q[pixel * num_classes + c]

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
  LabelMask argmax() const;
};

// Exact Gibbs energy of a hard labeling: sum of unaries plus, over all
// pixel pairs i<j with differing labels, w0 * sum_m w_m * k_m(f_i, f_j).
// With per-class kernel weights the pair uses the mean of the two classes'
// weights (symmetric; identical to either choice when weights are uniform).
// O(n^2): guarded to n <= 4096 pixels.
double energy(const DenseCrfProblem& problem, const LabelMask& labeling);

// Builds the stacked kernel feature vectors ([x, y] or [x, y, range...])
// divided by their bandwidths, so the kernel is exp(-||f_i - f_j||^2 / 2).
FeatureField kernel_features(const KernelSpec& k, const FeatureField& range,
                             int width, int height);

// Exact high-dimensional Gaussian filter excluding self-interaction:
// out_i = sum_{j != i} exp(-||f_i - f_j||^2 / 2) * v_j, applied to each of
// `channels` interleaved value channels. O(n^2), guarded to n <= 4096.
std::vector<float> filter_bruteforce(const std::vector<float>& values, int channels,
                                     const FeatureField& scaled_features);

// Approximate filter with the same contract. Pure-spatial feature fields
// (exactly the pixel grid over bandwidth) use separable truncated Gaussian
// convolution; anything else goes through a downsampled bilateral grid with
// the per-pixel self-weight removed exactly.
std::vector<float> filter_fast(const std::vector<float>& values, int channels,
                               const FeatureField& scaled_features);

enum class FilterMode { exact, fast, automatic };  // automatic: exact for n <= 1024
enum class InitMode { softmax_unary, uniform };
enum class StepRule { diminishing, fixed };  // diminishing: eta_t = 2/(t+2)

// When supplied to a solver, receives one entry per iteration: the max over
// pixels of |sum_c Q[c] - 1| after that update (simplex residual).
using IterationTrace = std::vector<double>;

// Parallel mean-field updates: per iteration, filter every class channel of
// Q under every kernel, apply class weights and the Potts transform, add
// the unary and renormalize with a pixelwise softmax. iterations == 0
// returns the initialization.
Marginals mean_field_infer(const DenseCrfProblem& problem, int iterations,
                           InitMode init = InitMode::softmax_unary,
                           FilterMode filter = FilterMode::automatic, int threads = 1,
                           IterationTrace* trace = nullptr);

// Conditional-gradient descent on the relaxed energy over per-pixel
// simplices. Each step solves an entropy-regularized linear subproblem
// (softmax of -gradient/regularizer) and moves Q ← (1-eta) Q + eta S.
Marginals frank_wolfe_infer(const DenseCrfProblem& problem, int iterations,
                            StepRule rule = StepRule::diminishing,
                            float regularizer = 1.0f, float fixed_step = 1.0f,
                            FilterMode filter = FilterMode::automatic, int threads = 1,
                            IterationTrace* trace = nullptr);

enum class CrfSolver { mean_field, frank_wolfe };

struct RefineConfig {
  CrfSolver solver = CrfSolver::frank_wolfe;
  int iterations = 5;
  float w0 = 1.0f;
  float w_appearance = 1.0f;
  float w_smoothness = 0.05f;
  float alpha = 80.0f;  // appearance spatial bandwidth, px
  float beta = 13.0f;   // appearance range bandwidth, feature units
  float gamma = 3.0f;   // smoothness bandwidth, px
  float regularizer = 1.0f;       // Frank-Wolfe entropic strength
  StepRule step_rule = StepRule::diminishing;
  float fixed_step = 1.0f;
  float unary_clamp = 1e-6f;
  FilterMode filter = FilterMode::automatic;
  int threads = 1;
};

// Two-class refinement of a probability map. Unary = -log(clamp(p)). With
// no feature field the appearance kernel runs on standardized intensity
// scaled by 10; a supplied field replaces intensity (the class-discriminative
// variant). Returns the class-1 marginal.
ProbabilityMap refine(const ProbabilityMap& prob_map, const Image2D& image,
                      const FeatureField* features, const RefineConfig& config,
                      IterationTrace* trace = nullptr);

}  // namespace crisp

#endif
