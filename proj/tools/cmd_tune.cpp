#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "crisp/csv.hpp"
#include "crisp/errors.hpp"
#include "crisp/mrc.hpp"
#include "crisp/parallel.hpp"
#include "crisp/picker.hpp"
#include "crisp/star.hpp"

namespace crisp::tools {

KvConfig tune_keys() {
  return KvConfig({
      {"maps", "", "comma list of segmentation maps (MRC)", true},
      {"gts", "", "comma list of ground-truth STAR files, paired by order", true},
      {"radius", "", "expected particle radius in px", true},
      {"out_grid", "", "full grid results (CSV)", true},
      {"out_winner", "", "winning row (CSV, default: <out_grid>.winner.csv)", false},
      {"algorithms", "morphology,crocker_grier,nms", "algorithms to search", false},
      {"e_grid", "", "override e values for every algorithm (comma list)", false},
      {"s_grid", "", "override s values for every algorithm (comma list)", false},
      {"iou_thresholds", "", "comma list (default: 0.50,0.55,...,0.95)", false},
      {"threads", "0", "worker threads (0 = CRISP_THREADS or hardware)", false},
  });
}

void run_tune(const KvConfig& cfg) {
  const std::vector<std::string> map_paths = cfg.get_strings("maps");
  const std::vector<std::string> gt_paths = cfg.get_strings("gts");
  if (map_paths.empty()) throw ConfigError("maps: empty list");
  if (map_paths.size() != gt_paths.size()) {
    throw ConfigError("maps and gts must pair up (" + std::to_string(map_paths.size()) +
                      " vs " + std::to_string(gt_paths.size()) + ")");
  }

  TuneOptions opt;
  opt.radius = cfg.get_float("radius");
  opt.algorithms.clear();
  for (const std::string& name : cfg.get_strings("algorithms")) {
    opt.algorithms.push_back(algorithm_from_name(name));
  }
  for (double e : cfg.get_doubles("e_grid")) opt.e_grid.push_back(static_cast<float>(e));
  for (double s : cfg.get_doubles("s_grid")) opt.s_grid.push_back(static_cast<float>(s));
  if (cfg.has("iou_thresholds")) opt.thresholds = cfg.get_doubles("iou_thresholds");
  opt.threads = resolve_threads(cfg.get_int("threads"));

  std::vector<ValidationPair> validation;
  for (std::size_t i = 0; i < map_paths.size(); ++i) {
    ValidationPair pair{ProbabilityMap(read_mrc_image(map_paths[i])),
                        pick_set_from_star(read_star(gt_paths[i]), 2 * opt.radius,
                                           2 * opt.radius)};
    validation.push_back(std::move(pair));
  }

  const TuneResult result = optimize_picker(validation, opt);

  CsvTable grid;
  grid.header = {"algorithm", "e", "s", "mean_ap", "empty_picks"};
  for (const GridEntry& g : result.table) {
    grid.rows.push_back({algorithm_name(g.algorithm), format_double(g.e, 6),
                         format_double(g.s, 6), format_double(g.mean_ap, 6),
                         g.empty_picks ? "1" : "0"});
  }
  const std::string grid_path = cfg.get_string("out_grid");
  write_csv(grid_path, grid);

  CsvTable winner;
  winner.header = grid.header;
  winner.rows.push_back({algorithm_name(result.best.algorithm),
                         format_double(result.best.e, 6), format_double(result.best.s, 6),
                         format_double(result.best_map, 6), "0"});
  const std::string winner_path =
      cfg.has("out_winner") ? cfg.get_string("out_winner") : grid_path + ".winner.csv";
  write_csv(winner_path, winner);

  cfg.write_effective(grid_path + ".config.txt", "tune");
  std::cout << "tune: " << result.table.size() << " configurations over "
            << validation.size() << " micrographs -> " << grid_path << "\n";
  std::cout << "tune: winner algorithm=" << algorithm_name(result.best.algorithm)
            << " e=" << format_double(result.best.e, 6)
            << " s=" << format_double(result.best.s, 6)
            << " mean_ap=" << format_double(result.best_map, 6) << "\n";
}

}  // namespace crisp::tools
