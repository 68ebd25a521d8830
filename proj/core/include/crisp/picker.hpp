#ifndef CRISP_PICKER_HPP
#define CRISP_PICKER_HPP

#include <string>
#include <utility>
#include <vector>

#include "crisp/image.hpp"

namespace crisp {

enum class PickerAlgorithm { morphology, crocker_grier, nms };

std::string algorithm_name(PickerAlgorithm a);
PickerAlgorithm algorithm_from_name(const std::string& name);

// Algorithm plus its two grid hyperparameters. `e` controls the candidate
// search scale, `s` the duplicate/overlap strictness; see each picker.
struct PickerConfig {
  PickerAlgorithm algorithm = PickerAlgorithm::morphology;
  float radius = 0.0f;  // expected particle radius, px
  float e = 0.0f;
  float s = 0.0f;
};

// Default (e, s) search grid for an algorithm.
std::pair<std::vector<float>, std::vector<float>> default_grid(PickerAlgorithm a);
bool on_default_grid(PickerAlgorithm a, float e, float s);

// Min-max normalize, erode with a square kernel of side floor(radius/4),
// erode again with side floor(radius/e), then keep connected components
// with radius^s <= area <= 500000 whose minimal enclosing circle radius is
// within [0.5, 2] x radius. Centers are the enclosing-circle centers,
// scores the component's summed map values.
PickSet pick_morphology(const ProbabilityMap& map, float radius, float e, float s);

// Downscale by factor e, find local maxima above mean + 1 sd within
// diameter-sized windows, refine by intensity-weighted centroid, drop the
// lighter blob of any pair closer than diameter * s, map centers back to
// the original resolution. Scores are the blob masses.
PickSet pick_crocker_grier(const ProbabilityMap& map, float diameter, float e, float s);

// Score each pixel by a Gaussian-weighted window sum (window = diameter),
// take the best scorer of each grid cell of side floor(diameter * e) as a
// candidate, hill-climb each candidate to a local maximum, then greedily
// drop the lower scorer of any pair closer than diameter * s.
PickSet pick_nms(const ProbabilityMap& map, float diameter, float e, float s);

PickSet run_picker(const ProbabilityMap& map, const PickerConfig& config);

struct BoundingBox {
  float x_min = 0, y_min = 0, x_max = 0, y_max = 0;
};

// (x - w/2, y - h/2, x + w/2, y + h/2) per center; no clipping.
std::vector<BoundingBox> centers_to_boxes(const PickSet& picks);

float iou_box(const BoundingBox& a, const BoundingBox& b);

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> default_iou_thresholds();

struct DetectionMetrics {
  double mean_ap = 0.0;
  std::vector<double> thresholds;
  std::vector<double> ap;  // one per threshold
  double precision_50 = 0.0;
  double recall_50 = 0.0;
  double f1_50 = 0.0;
  // Raw precision/recall after each prediction (descending score) at the
  // 0.5 threshold; useful for plotting the PR curve.
  std::vector<double> sweep_precision_50;
  std::vector<double> sweep_recall_50;
};

// Greedy one-to-one matching in descending prediction-score order; a match
// needs IoU >= threshold and each ground-truth box is used at most once.
// AP integrates the interpolated precision over the recall sweep; the
// precision/recall/F1 fields are taken at threshold 0.5. Empty ground truth
// is an error.
DetectionMetrics evaluate_map(const PickSet& gt, const PickSet& pred,
                              const std::vector<double>& thresholds = default_iou_thresholds());

// One validation micrograph: the segmentation map the pickers run on plus
// its ground-truth centers (box size taken from `gt`).
struct ValidationPair {
  ProbabilityMap map;
  PickSet gt;
};

struct GridEntry {
  PickerAlgorithm algorithm;
  float e = 0, s = 0;
  double mean_ap = 0.0;
  bool empty_picks = false;  // no configuration output on any micrograph
};

struct TuneResult {
  PickerConfig best;
  double best_map = 0.0;
  std::vector<GridEntry> table;
};

struct TuneOptions {
  float radius = 0.0f;  // expected particle radius, px
  std::vector<PickerAlgorithm> algorithms = {
      PickerAlgorithm::morphology, PickerAlgorithm::crocker_grier, PickerAlgorithm::nms};
  // Empty grids fall back to default_grid(algorithm).
  std::vector<float> e_grid;
  std::vector<float> s_grid;
  std::vector<double> thresholds = default_iou_thresholds();
  int threads = 1;
};

// Exhaustive grid search: every (algorithm, e, s) is scored by the mean
// evaluate_map mAP over the validation set; returns the argmax with ties
// broken by algorithm order, then smaller e, then smaller s. Errors if
// every configuration picks nothing anywhere.
TuneResult optimize_picker(const std::vector<ValidationPair>& validation,
                           const TuneOptions& options);

// 0/1 probability view of a binary mask, for running pickers on labels.
ProbabilityMap probability_map_from_mask(const LabelMask& mask);

}  // namespace crisp

#endif
