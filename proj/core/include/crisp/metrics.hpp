#ifndef CRISP_METRICS_HPP
#define CRISP_METRICS_HPP

#include <cstdint>
#include <string>

#include "crisp/image.hpp"

namespace crisp {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
};

// Pixel counts of pred vs gt; both masks must be binary and the same shape.
ConfusionCounts confusion(const LabelMask& pred, const LabelMask& gt);

// IoU = TP/(TP+FP+FN), F1 = 2TP/(2TP+FP+FN), precision, recall, accuracy.
// A zero denominator yields 0 with the matching *_defined flag cleared;
// accuracy is always defined (total > 0 is required by confusion()).
struct PixelMetrics {
  double iou = 0, precision = 0, recall = 0, accuracy = 0, f1 = 0;
  bool iou_defined = true, precision_defined = true, recall_defined = true,
       f1_defined = true;
};

PixelMetrics pixel_metrics(const ConfusionCounts& c);

enum class LossKind { dice, jaccard, tversky, lovasz, cross_entropy };

LossKind loss_from_name(const std::string& name);
std::string loss_name(LossKind k);

// Soft segmentation losses: set sizes generalize to sums of products
// (|Y ∩ Ŷ| = Σ y·ŷ etc), so hard masks reproduce the set forms exactly.
// tversky weights false negatives by alpha and false positives by beta;
// (1,1) reduces to jaccard and (0.5,0.5) to dice. lovasz is the per-pixel
// hinge Σ (1 - ŷ·y); cross_entropy is the summed binary cross entropy with
// probabilities clamped to [1e-7, 1-1e-7]. Degenerate 0/0 overlap ratios
// evaluate to a loss of 0.
double loss(LossKind kind, const ProbabilityMap& pred, const LabelMask& gt,
            double tversky_alpha = 0.5, double tversky_beta = 0.5);

}  // namespace crisp

#endif
