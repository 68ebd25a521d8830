#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "crisp/errors.hpp"
#include "crisp/parallel.hpp"
#include "crisp/picker.hpp"

namespace crisp {

std::string algorithm_name(PickerAlgorithm a) {
  switch (a) {
    case PickerAlgorithm::morphology: return "morphology";
    case PickerAlgorithm::crocker_grier: return "crocker_grier";
    case PickerAlgorithm::nms: return "nms";
  }
  return "unknown";
}

PickerAlgorithm algorithm_from_name(const std::string& name) {
  if (name == "morphology") return PickerAlgorithm::morphology;
  if (name == "crocker_grier") return PickerAlgorithm::crocker_grier;
  if (name == "nms") return PickerAlgorithm::nms;
  throw ConfigError("unknown picker algorithm: " + name);
}

std::pair<std::vector<float>, std::vector<float>> default_grid(PickerAlgorithm a) {
  switch (a) {
    case PickerAlgorithm::morphology:
      return {{2.0f, 4.0f, 6.0f}, {0.6f, 1.0f, 1.4f}};
    case PickerAlgorithm::crocker_grier:
      return {{0.15f, 0.25f, 0.35f}, {0.4f, 0.7f, 1.0f}};
    case PickerAlgorithm::nms:
      return {{0.4f, 0.5f, 0.6f}, {0.4f, 0.7f, 1.0f}};
  }
  return {};
}

bool on_default_grid(PickerAlgorithm a, float e, float s) {
  const auto [es, ss] = default_grid(a);
  const bool e_ok = std::find(es.begin(), es.end(), e) != es.end();
  const bool s_ok = std::find(ss.begin(), ss.end(), s) != ss.end();
  return e_ok && s_ok;
}

PickSet run_picker(const ProbabilityMap& map, const PickerConfig& config) {
  switch (config.algorithm) {
    case PickerAlgorithm::morphology:
      return pick_morphology(map, config.radius, config.e, config.s);
    case PickerAlgorithm::crocker_grier:
      return pick_crocker_grier(map, 2.0f * config.radius, config.e, config.s);
    case PickerAlgorithm::nms:
      return pick_nms(map, 2.0f * config.radius, config.e, config.s);
  }
  throw ConfigError("run_picker: invalid algorithm");
}

std::vector<BoundingBox> centers_to_boxes(const PickSet& picks) {
  if (!(picks.box_width > 0.0f) || !(picks.box_height > 0.0f)) {
    throw ConfigError("centers_to_boxes: box size must be positive");
  }
  std::vector<BoundingBox> boxes;
  boxes.reserve(picks.centers.size());
  const float hw = picks.box_width * 0.5f;
  const float hh = picks.box_height * 0.5f;
  for (const Center& c : picks.centers) {
    boxes.push_back(BoundingBox{c.x - hw, c.y - hh, c.x + hw, c.y + hh});
  }
  return boxes;
}

float iou_box(const BoundingBox& a, const BoundingBox& b) {
  const float ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const float iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0f || iy <= 0.0f) return 0.0f;
  const float inter = ix * iy;
  const float area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  const float area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
  return inter / (area_a + area_b - inter);
}

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

namespace {

struct MatchResult {
  std::vector<bool> tp;  // per prediction, in descending-score order
  int num_tp = 0;
};

// Greedy one-to-one matcher: predictions in descending score order claim
// their best-IoU unmatched ground-truth box if it clears the threshold.
MatchResult match_boxes(const std::vector<BoundingBox>& gt,
                        const std::vector<BoundingBox>& pred,
                        const std::vector<std::size_t>& order, double threshold) {
  MatchResult r;
  r.tp.assign(pred.size(), false);
  std::vector<bool> taken(gt.size(), false);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const BoundingBox& p = pred[order[rank]];
    double best_iou = 0.0;
    std::size_t best_g = gt.size();
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g]) continue;
      const double iou = iou_box(gt[g], p);
      if (iou > best_iou) {
        best_iou = iou;
        best_g = g;
      }
    }
    if (best_g < gt.size() && best_iou >= threshold) {
      taken[best_g] = true;
      r.tp[rank] = true;
      ++r.num_tp;
    }
  }
  return r;
}

double average_precision(const MatchResult& m, std::size_t num_gt) {
  const std::size_t n = m.tp.size();
  if (n == 0 || num_gt == 0) return 0.0;
  std::vector<double> precision(n), recall(n);
  int tp_cum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.tp[i]) ++tp_cum;
    precision[i] = static_cast<double>(tp_cum) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp_cum) / static_cast<double>(num_gt);
  }
  // Monotone interpolation: precision at recall r is the max at any r' >= r.
  for (std::size_t i = n - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.tp[i]) continue;
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace

DetectionMetrics evaluate_map(const PickSet& gt, const PickSet& pred,
                              const std::vector<double>& thresholds) {
  if (gt.centers.empty()) throw ConfigError("evaluate_map: empty ground truth");
  if (thresholds.empty()) throw ConfigError("evaluate_map: no IoU thresholds");
  const std::vector<BoundingBox> gt_boxes = centers_to_boxes(gt);
  const std::vector<BoundingBox> pred_boxes = centers_to_boxes(pred);

  // Descending score, stable on the input order.
  std::vector<std::size_t> order(pred_boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred.centers[a].score > pred.centers[b].score;
  });

  DetectionMetrics out;
  out.thresholds = thresholds;
  out.ap.reserve(thresholds.size());
  double sum_ap = 0.0;
  for (double t : thresholds) {
    const MatchResult m = match_boxes(gt_boxes, pred_boxes, order, t);
    const double ap = average_precision(m, gt_boxes.size());
    out.ap.push_back(ap);
    sum_ap += ap;

    if (std::abs(t - 0.5) < 1e-12) {
      const double tp = m.num_tp;
      const double fp = static_cast<double>(pred_boxes.size()) - tp;
      const double fn = static_cast<double>(gt_boxes.size()) - tp;
      out.precision_50 = pred_boxes.empty() ? 0.0 : tp / (tp + fp);
      out.recall_50 = tp / (tp + fn);
      out.f1_50 = (2 * tp + fp + fn) > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
      out.sweep_precision_50.resize(m.tp.size());
      out.sweep_recall_50.resize(m.tp.size());
      int tp_cum = 0;
      for (std::size_t i = 0; i < m.tp.size(); ++i) {
        if (m.tp[i]) ++tp_cum;
        out.sweep_precision_50[i] = static_cast<double>(tp_cum) / static_cast<double>(i + 1);
        out.sweep_recall_50[i] = static_cast<double>(tp_cum) / static_cast<double>(gt_boxes.size());
      }
    }
  }
  out.mean_ap = sum_ap / thresholds.size();
  return out;
}

ProbabilityMap probability_map_from_mask(const LabelMask& mask) {
  Image2D img(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.labels.size(); ++i) {
    if (mask.labels[i] > 1) {
      throw NumericalError("probability_map_from_mask: mask is not binary");
    }
    img.data[i] = mask.labels[i] ? 1.0f : 0.0f;
  }
  return ProbabilityMap(std::move(img));
}

TuneResult optimize_picker(const std::vector<ValidationPair>& validation,
                           const TuneOptions& options) {
  if (validation.empty()) throw ConfigError("optimize_picker: empty validation set");
  if (!(options.radius >= 2.0f)) throw ConfigError("optimize_picker: radius must be >= 2");
  if (options.algorithms.empty()) throw ConfigError("optimize_picker: no algorithms");

  std::vector<PickerConfig> configs;
  for (PickerAlgorithm a : options.algorithms) {
    auto [e_grid, s_grid] = default_grid(a);
    if (!options.e_grid.empty()) e_grid = options.e_grid;
    if (!options.s_grid.empty()) s_grid = options.s_grid;
    for (float e : e_grid) {
      for (float s : s_grid) {
        configs.push_back(PickerConfig{a, options.radius, e, s});
      }
    }
  }

  std::vector<GridEntry> table(configs.size());
  parallel_for(configs.size(), options.threads, [&](std::size_t ci) {
    const PickerConfig& cfg = configs[ci];
    double sum_map = 0.0;
    bool any_picks = false;
    for (const ValidationPair& pair : validation) {
      const PickSet picks = run_picker(pair.map, cfg);
      if (!picks.centers.empty()) any_picks = true;
      sum_map += evaluate_map(pair.gt, picks, options.thresholds).mean_ap;
    }
    table[ci] = GridEntry{cfg.algorithm, cfg.e, cfg.s,
                          sum_map / static_cast<double>(validation.size()), !any_picks};
  });

  bool all_empty = true;
  for (const GridEntry& g : table) all_empty = all_empty && g.empty_picks;
  if (all_empty) {
    std::ostringstream msg;
    msg << "optimize_picker: every configuration produced zero picks:";
    for (const GridEntry& g : table) {
      msg << "\n  " << algorithm_name(g.algorithm) << " e=" << g.e << " s=" << g.s;
    }
    throw ConfigError(msg.str());
  }

  // Argmax with the documented tie-break: configs are already ordered by
  // (algorithm order, e, s), so a strict > keeps the earliest maximum.
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].mean_ap > table[best].mean_ap) best = i;
  }
  TuneResult result;
  result.best = configs[best];
  result.best_map = table[best].mean_ap;
  result.table = std::move(table);
  return result;
}

}  // namespace crisp
