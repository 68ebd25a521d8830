#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "crisp/csv.hpp"
#include "crisp/errors.hpp"
#include "crisp/mrc.hpp"
#include "crisp/picker.hpp"
#include "crisp/star.hpp"
#include "svgplot.hpp"

namespace crisp::tools {

namespace {

std::string threshold_label(double t) { return "ap@" + format_double(t, 2); }

}  // namespace

KvConfig pick_keys() {
  return KvConfig({
      {"input", "", "segmentation map (MRC) to pick from", true},
      {"output", "", "picked centers (STAR)", true},
      {"algorithm", "morphology", "morphology, crocker_grier or nms", false},
      {"radius", "", "expected particle radius in px", true},
      {"e", "", "candidate-scale parameter (default: grid midpoint)", false},
      {"s", "", "overlap-strictness parameter (default: grid midpoint)", false},
      {"micrograph", "", "micrograph name stored in the STAR (default: input filename)",
       false},
      {"gt", "", "ground-truth STAR; enables detection metrics", false},
      {"report", "", "metrics CSV (default: <output>.metrics.csv when gt is set)", false},
      {"plot", "", "precision-recall SVG at IoU 0.5 (needs gt)", false},
      {"iou_thresholds", "", "comma list (default: 0.50,0.55,...,0.95)", false},
  });
}

void run_pick(const KvConfig& cfg) {
  const ProbabilityMap map(read_mrc_image(cfg.get_string("input")));

  PickerConfig pc;
  pc.algorithm = algorithm_from_name(cfg.get_string("algorithm"));
  pc.radius = cfg.get_float("radius");
  const auto [e_grid, s_grid] = default_grid(pc.algorithm);
  pc.e = cfg.has("e") ? cfg.get_float("e") : e_grid[e_grid.size() / 2];
  pc.s = cfg.has("s") ? cfg.get_float("s") : s_grid[s_grid.size() / 2];
  if (!on_default_grid(pc.algorithm, pc.e, pc.s)) {
    std::cerr << "pick: warning: (e=" << format_double(pc.e, 3)
              << ", s=" << format_double(pc.s, 3) << ") is off the tuned "
              << algorithm_name(pc.algorithm) << " grid\n";
  }

  PickSet picks = run_picker(map, pc);
  std::string name = cfg.get_string("micrograph");
  if (name.empty()) {
    name = std::filesystem::path(cfg.get_string("input")).filename().string();
  }
  const std::string out_path = cfg.get_string("output");
  write_star(out_path, star_rows(picks, name));
  std::cout << "pick: " << picks.centers.size() << " centers -> " << out_path << "\n";

  if (cfg.has("gt")) {
    const PickSet gt =
        pick_set_from_star(read_star(cfg.get_string("gt")), 2 * pc.radius, 2 * pc.radius);
    const std::vector<double> thresholds =
        cfg.has("iou_thresholds") ? cfg.get_doubles("iou_thresholds")
                                  : default_iou_thresholds();
    const DetectionMetrics dm = evaluate_map(gt, picks, thresholds);

    CsvTable report;
    report.header = {"algorithm", "e",       "s",         "num_picks",
                     "mean_ap",   "precision_50", "recall_50", "f1_50"};
    for (double t : dm.thresholds) report.header.push_back(threshold_label(t));
    std::vector<std::string> row = {algorithm_name(pc.algorithm),
                                    format_double(pc.e, 6),
                                    format_double(pc.s, 6),
                                    std::to_string(picks.centers.size()),
                                    format_double(dm.mean_ap, 6),
                                    format_double(dm.precision_50, 6),
                                    format_double(dm.recall_50, 6),
                                    format_double(dm.f1_50, 6)};
    for (double ap : dm.ap) row.push_back(format_double(ap, 6));
    report.rows.push_back(std::move(row));

    const std::string report_path =
        cfg.has("report") ? cfg.get_string("report") : out_path + ".metrics.csv";
    write_csv(report_path, report);
    std::cout << "pick: mean_ap " << format_double(dm.mean_ap, 6) << " -> " << report_path
              << "\n";

    if (cfg.has("plot")) {
      write_svg_plot(cfg.get_string("plot"), "precision-recall (IoU 0.5)", "recall",
                     "precision", dm.sweep_recall_50, dm.sweep_precision_50);
    }
  } else if (cfg.has("plot") || cfg.has("report")) {
    throw ConfigError("report/plot need gt=");
  }

  cfg.write_effective(out_path + ".config.txt", "pick");
}

}  // namespace crisp::tools
