#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "crisp/crf.hpp"
#include "crisp/errors.hpp"
#include "crisp/mrc.hpp"
#include "crisp/parallel.hpp"
#include "crisp/patchwork.hpp"

namespace crisp::tools {

namespace {

CrfSolver parse_solver(const std::string& s) {
  if (s == "meanfield" || s == "mean_field" || s == "mf") return CrfSolver::mean_field;
  if (s == "frankwolfe" || s == "frank_wolfe" || s == "fw") return CrfSolver::frank_wolfe;
  throw ConfigError("solver: expected meanfield or frankwolfe, got '" + s + "'");
}

StepRule parse_step_rule(const std::string& s) {
  if (s == "diminishing") return StepRule::diminishing;
  if (s == "fixed") return StepRule::fixed;
  throw ConfigError("step_rule: expected diminishing or fixed, got '" + s + "'");
}

FilterMode parse_filter(const std::string& s) {
  if (s == "auto" || s == "automatic") return FilterMode::automatic;
  if (s == "exact") return FilterMode::exact;
  if (s == "fast") return FilterMode::fast;
  throw ConfigError("filter: expected auto, exact or fast, got '" + s + "'");
}

FeatureField stack_to_features(const std::vector<Image2D>& planes) {
  if (planes.empty()) throw ConfigError("features: empty stack");
  const int w = planes[0].width, h = planes[0].height;
  FeatureField f(w, h, static_cast<int>(planes.size()));
  for (std::size_t d = 0; d < planes.size(); ++d) {
    if (planes[d].width != w || planes[d].height != h) {
      throw ShapeError("features: stack sections differ in shape");
    }
    for (std::size_t p = 0; p < planes[d].data.size(); ++p) {
      f.data[p * planes.size() + d] = planes[d].data[p];
    }
  }
  return f;
}

void log_trace(const IterationTrace& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", trace[i]);
    std::cout << "refine: iter " << (i + 1) << " simplex_residual " << buf << "\n";
  }
}

}  // namespace

KvConfig refine_keys() {
  return KvConfig({
      {"input", "", "probability map (MRC, values in [0,1])", true},
      {"output", "", "refined probability map (MRC)", true},
      {"image", "", "micrograph backing the intensity appearance kernel", false},
      {"features", "", "MRC stack of per-pixel feature planes (replaces intensity)",
       false},
      {"solver", "frankwolfe", "meanfield or frankwolfe", false},
      {"iterations", "5", "solver iterations", false},
      {"w0", "1.0", "pairwise compatibility scale", false},
      {"w_appearance", "1.0", "appearance kernel weight (0 disables)", false},
      {"w_smoothness", "0.05", "smoothness kernel weight (0 disables)", false},
      {"alpha", "80", "appearance spatial bandwidth (px)", false},
      {"beta", "13", "appearance range bandwidth", false},
      {"gamma", "3", "smoothness spatial bandwidth (px)", false},
      {"regularizer", "1.0", "frankwolfe entropic regularizer", false},
      {"step_rule", "diminishing", "frankwolfe step rule: diminishing or fixed", false},
      {"fixed_step", "1.0", "step size when step_rule = fixed", false},
      {"filter", "auto", "pairwise filtering: auto, exact or fast", false},
      {"patch_size", "512", "tile side for large inputs", false},
      {"overlap", "64", "tile overlap (also the blend ramp length)", false},
      {"threads", "0", "worker threads (0 = CRISP_THREADS or hardware)", false},
  });
}

void run_refine(const KvConfig& cfg) {
  const ProbabilityMap input(read_mrc_image(cfg.get_string("input")));

  RefineConfig rc;
  rc.solver = parse_solver(cfg.get_string("solver"));
  rc.iterations = cfg.get_int("iterations");
  rc.w0 = cfg.get_float("w0");
  rc.w_appearance = cfg.get_float("w_appearance");
  rc.w_smoothness = cfg.get_float("w_smoothness");
  rc.alpha = cfg.get_float("alpha");
  rc.beta = cfg.get_float("beta");
  rc.gamma = cfg.get_float("gamma");
  rc.regularizer = cfg.get_float("regularizer");
  rc.step_rule = parse_step_rule(cfg.get_string("step_rule"));
  rc.fixed_step = cfg.get_float("fixed_step");
  rc.filter = parse_filter(cfg.get_string("filter"));
  const int threads = resolve_threads(cfg.get_int("threads"));

  const bool has_image = cfg.has("image");
  const bool has_features = cfg.has("features");
  if (rc.w_appearance > 0.0f && !has_image && !has_features) {
    throw ConfigError("appearance kernel needs image= or features= (or set w_appearance=0)");
  }

  Image2D image(input.width(), input.height(), input.map.pixel_size);
  if (has_image) {
    image = read_mrc_image(cfg.get_string("image"));
    if (image.width != input.width() || image.height != input.height()) {
      throw ShapeError("image shape does not match the probability map");
    }
  }
  FeatureField features;
  if (has_features) {
    features = stack_to_features(read_mrc_stack(cfg.get_string("features")));
    if (features.width != input.width() || features.height != input.height()) {
      throw ShapeError("feature stack shape does not match the probability map");
    }
  }
  const FeatureField* feat_ptr = has_features ? &features : nullptr;

  const int patch_size = cfg.get_int("patch_size");
  const int overlap = cfg.get_int("overlap");
  const std::string out_path = cfg.get_string("output");

  ProbabilityMap refined(Image2D(1, 1));
  IterationTrace trace;
  if (input.width() <= patch_size && input.height() <= patch_size) {
    rc.threads = threads;
    refined = refine(input, image, feat_ptr, rc, &trace);
  } else {
    PatchGrid grid = extract_patches(input.map, patch_size, overlap);
    const PatchGrid img_grid =
        has_image ? extract_patches(image, patch_size, overlap) : PatchGrid{};
    std::vector<PatchGrid> feat_grids;
    if (has_features) {
      for (int d = 0; d < features.dim; ++d) {
        Image2D plane(features.width, features.height);
        for (std::size_t p = 0; p < plane.data.size(); ++p) {
          plane.data[p] = features.data[p * features.dim + d];
        }
        feat_grids.push_back(extract_patches(plane, patch_size, overlap));
      }
    }
    std::cout << "refine: " << grid.patches.size() << " patches (" << grid.rows << " x "
              << grid.cols << ", size " << patch_size << " overlap " << overlap << ")\n";

    rc.threads = 1;
    parallel_for(grid.patches.size(), threads, [&](std::size_t i) {
      const ProbabilityMap part(Image2D(grid.patches[i]));
      Image2D part_img(part.width(), part.height(), image.pixel_size);
      if (has_image) part_img = img_grid.patches[i];
      FeatureField part_feat;
      if (has_features) {
        part_feat = FeatureField(part.width(), part.height(), features.dim);
        for (int d = 0; d < features.dim; ++d) {
          const Image2D& plane = feat_grids[d].patches[i];
          for (std::size_t p = 0; p < plane.data.size(); ++p) {
            part_feat.data[p * features.dim + d] = plane.data[p];
          }
        }
      }
      // The first patch doubles as the convergence probe for the log.
      const ProbabilityMap out = refine(part, part_img, has_features ? &part_feat : nullptr,
                                        rc, i == 0 ? &trace : nullptr);
      grid.patches[i] = out.map;
    });
    refined = stitch(grid, grid.canvas_width, grid.canvas_height, std::max(1, overlap));
  }

  log_trace(trace);
  Image2D out_img = refined.map;
  out_img.pixel_size = input.map.pixel_size;
  write_mrc(out_path, out_img);
  cfg.write_effective(out_path + ".config.txt", "refine");
  std::cout << "refine: wrote " << out_path << "\n";
}

}  // namespace crisp::tools
