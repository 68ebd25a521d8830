#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "crisp/csv.hpp"
#include "crisp/errors.hpp"
#include "crisp/metrics.hpp"
#include "crisp/mrc.hpp"

namespace crisp::tools {

namespace {

LabelMask mask_from_image(const Image2D& img, const char* what) {
  LabelMask mask(img.width, img.height, 2);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    if (img.data[i] == 0.0f) {
      mask.labels[i] = 0;
    } else if (img.data[i] == 1.0f) {
      mask.labels[i] = 1;
    } else {
      throw NumericalError(std::string(what) + ": not a binary mask (value " +
                           std::to_string(img.data[i]) + ")");
    }
  }
  return mask;
}

}  // namespace

KvConfig eval_keys() {
  return KvConfig({
      {"pred", "", "predicted probability map or binary mask (MRC)", true},
      {"gt", "", "ground-truth binary mask (MRC)", true},
      {"output", "", "metrics CSV", true},
      {"threshold", "0.5", "binarization threshold for pred", false},
      {"losses", "false", "also report the soft losses of pred vs gt", false},
      {"tversky_alpha", "0.5", "tversky false-negative weight", false},
      {"tversky_beta", "0.5", "tversky false-positive weight", false},
  });
}

void run_eval(const KvConfig& cfg) {
  const ProbabilityMap pred(read_mrc_image(cfg.get_string("pred")));
  const LabelMask gt = mask_from_image(read_mrc_image(cfg.get_string("gt")), "gt");
  const float threshold = cfg.get_float("threshold");
  const LabelMask pred_mask = binarize(pred, threshold);

  const ConfusionCounts counts = confusion(pred_mask, gt);
  const PixelMetrics pm = pixel_metrics(counts);

  CsvTable table;
  table.header = {"tp",        "fp",       "fn",     "tn",
                  "iou",       "precision", "recall", "accuracy",
                  "f1",        "iou_defined", "precision_defined", "recall_defined",
                  "f1_defined"};
  std::vector<std::string> row = {
      std::to_string(counts.tp),     std::to_string(counts.fp),
      std::to_string(counts.fn),     std::to_string(counts.tn),
      format_double(pm.iou, 6),      format_double(pm.precision, 6),
      format_double(pm.recall, 6),   format_double(pm.accuracy, 6),
      format_double(pm.f1, 6),       pm.iou_defined ? "1" : "0",
      pm.precision_defined ? "1" : "0", pm.recall_defined ? "1" : "0",
      pm.f1_defined ? "1" : "0"};

  if (cfg.get_bool("losses")) {
    const double ta = cfg.get_double("tversky_alpha");
    const double tb = cfg.get_double("tversky_beta");
    for (LossKind k : {LossKind::dice, LossKind::jaccard, LossKind::tversky,
                       LossKind::lovasz, LossKind::cross_entropy}) {
      table.header.push_back(loss_name(k) + "_loss");
      row.push_back(format_double(loss(k, pred, gt, ta, tb), 6));
    }
  }
  table.rows.push_back(std::move(row));

  const std::string out_path = cfg.get_string("output");
  write_csv(out_path, table);
  cfg.write_effective(out_path + ".config.txt", "eval");
  std::cout << "eval: iou " << format_double(pm.iou, 6) << " f1 "
            << format_double(pm.f1, 6) << " -> " << out_path << "\n";
}

}  // namespace crisp::tools
