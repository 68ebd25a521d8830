#include "crisp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "crisp/errors.hpp"

namespace crisp {

ConfusionCounts confusion(const LabelMask& pred, const LabelMask& gt) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw ShapeError("confusion: mask shapes differ");
  }
  if (pred.labels.empty()) throw ConfigError("confusion: empty masks");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    const std::uint8_t p = pred.labels[i], g = gt.labels[i];
    if (p > 1 || g > 1) throw NumericalError("confusion: masks must be binary");
    if (p && g) ++c.tp;
    else if (p && !g) ++c.fp;
    else if (!p && g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

PixelMetrics pixel_metrics(const ConfusionCounts& c) {
  PixelMetrics m;
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double tn = static_cast<double>(c.tn);

  if (tp + fp + fn > 0) {
    m.iou = tp / (tp + fp + fn);
  } else {
    m.iou_defined = false;  // both masks empty
  }
  if (tp + fp > 0) {
    m.precision = tp / (tp + fp);
  } else {
    m.precision_defined = false;
  }
  if (tp + fn > 0) {
    m.recall = tp / (tp + fn);
  } else {
    m.recall_defined = false;
  }
  m.accuracy = (tp + tn) / (tp + fp + fn + tn);
  if (2 * tp + fp + fn > 0) {
    m.f1 = 2 * tp / (2 * tp + fp + fn);
  } else {
    m.f1_defined = false;
  }
  return m;
}

LossKind loss_from_name(const std::string& name) {
  if (name == "dice") return LossKind::dice;
  if (name == "jaccard") return LossKind::jaccard;
  if (name == "tversky") return LossKind::tversky;
  if (name == "lovasz") return LossKind::lovasz;
  if (name == "cross_entropy") return LossKind::cross_entropy;
  throw ConfigError("unknown loss: " + name);
}

std::string loss_name(LossKind k) {
  switch (k) {
    case LossKind::dice: return "dice";
    case LossKind::jaccard: return "jaccard";
    case LossKind::tversky: return "tversky";
    case LossKind::lovasz: return "lovasz";
    case LossKind::cross_entropy: return "cross_entropy";
  }
  return "unknown";
}

double loss(LossKind kind, const ProbabilityMap& pred, const LabelMask& gt,
            double tversky_alpha, double tversky_beta) {
  if (pred.width() != gt.width || pred.height() != gt.height) {
    throw ShapeError("loss: prediction and ground truth shapes differ");
  }
  const std::size_t n = pred.map.data.size();
  if (n == 0) throw ConfigError("loss: empty inputs");

  // Soft set sizes: intersection = sum(y * p), |Y| = sum(y), |Yhat| = sum(p).
  double inter = 0.0, sum_y = 0.0, sum_p = 0.0;
  double soft_fn = 0.0, soft_fp = 0.0;  // sum y(1-p), sum p(1-y)
  double lovasz_sum = 0.0, ce_sum = 0.0;
  constexpr double kCeEps = 1e-7;
  for (std::size_t i = 0; i < n; ++i) {
    if (gt.labels[i] > 1) throw NumericalError("loss: ground truth must be binary");
    const double y = gt.labels[i];
    const double p = pred.map.data[i];
    inter += y * p;
    sum_y += y;
    sum_p += p;
    soft_fn += y * (1.0 - p);
    soft_fp += p * (1.0 - y);
    lovasz_sum += 1.0 - p * y;
    const double pc = std::clamp(p, kCeEps, 1.0 - kCeEps);
    ce_sum += y > 0.5 ? -std::log(pc) : -std::log(1.0 - pc);
  }

  switch (kind) {
    case LossKind::dice: {
      const double denom = sum_y + sum_p;
      return denom > 0.0 ? 1.0 - 2.0 * inter / denom : 0.0;
    }
    case LossKind::jaccard: {
      const double denom = sum_y + sum_p - inter;
      return denom > 0.0 ? 1.0 - inter / denom : 0.0;
    }
    case LossKind::tversky: {
      if (tversky_alpha < 0.0 || tversky_beta < 0.0) {
        throw ConfigError("tversky weights must be >= 0");
      }
      const double denom = inter + tversky_alpha * soft_fn + tversky_beta * soft_fp;
      return denom > 0.0 ? 1.0 - inter / denom : 0.0;
    }
    case LossKind::lovasz: return lovasz_sum;
    case LossKind::cross_entropy: return ce_sum;
  }
  throw ConfigError("loss: invalid kind");
}

}  // namespace crisp
