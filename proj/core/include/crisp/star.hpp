#ifndef CRISP_STAR_HPP
#define CRISP_STAR_HPP

#include <string>
#include <vector>

#include "crisp/image.hpp"

namespace crisp {

struct StarRow {
  std::string micrograph;  // empty when the file has no name column
  double x = 0.0;
  double y = 0.0;
  double score = 1.0;
};

// Reads particle coordinates from a STAR file. The first data_ block's
// loop_ must provide _rlnCoordinateX and _rlnCoordinateY; _rlnMicrographName
// and _rlnAutopickFigureOfMerit are picked up when present and all other
// columns are ignored. Negative coordinates are rejected.
std::vector<StarRow> read_star(const std::string& path);

// Writes a single-block STAR file with the four columns above, coordinates
// and scores fixed to six decimals. Output is byte-deterministic.
void write_star(const std::string& path, const std::vector<StarRow>& rows);

// PickSet adapters. star_rows uses one shared micrograph name for all
// centers; pick_set_from_star keeps only rows matching `micrograph` when it
// is non-empty, otherwise it takes every row.
std::vector<StarRow> star_rows(const PickSet& picks, const std::string& micrograph);
PickSet pick_set_from_star(const std::vector<StarRow>& rows, float box_width,
                           float box_height, const std::string& micrograph = "");

}  // namespace crisp

#endif
