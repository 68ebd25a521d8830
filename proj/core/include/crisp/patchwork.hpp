#ifndef CRISP_PATCHWORK_HPP
#define CRISP_PATCHWORK_HPP

#include <utility>
#include <vector>

#include "crisp/image.hpp"

namespace crisp {

// Overlapping square tiles covering an image. Tiles advance by
// stride = size - overlap; the last row/column is shifted inward so tiles
// never cross the (padded) canvas edge.
struct PatchGrid {
  int patch_size = 0;
  int overlap = 0;
  int canvas_width = 0;   // original image size before any padding
  int canvas_height = 0;
  int cols = 0;
  int rows = 0;
  std::vector<Image2D> patches;              // row-major over (rows, cols)
  std::vector<std::pair<int, int>> origins;  // top-left (x, y) per patch
};

// Number of tiles along one axis of length `extent`.
int patch_count(int extent, int size, int overlap);

// Cuts the image into the sliding-window grid. Images smaller than one
// patch are mirror-padded up to size x size first.
PatchGrid extract_patches(const Image2D& img, int size = 512, int overlap = 64);

// Blending weights for one tile: a 1D profile that rises 0 to 1 over
// `bandwidth` samples (raised cosine), stays at 1, and descends
// symmetrically; the 2D map is its outer product. Requires
// 2 * bandwidth <= size.
Image2D weight_map(int size, int bandwidth);

// Weighted average of overlapping tiles onto a canvas. Tiles on the grid
// boundary keep full weight up to their outward edges so border pixels are
// not dimmed. Every canvas pixel must receive positive total weight.
ProbabilityMap stitch(const PatchGrid& grid, int canvas_width, int canvas_height,
                      int bandwidth);

}  // namespace crisp

#endif
