#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "crisp/csv.hpp"
#include "crisp/errors.hpp"
#include "crisp/fsc.hpp"
#include "crisp/mrc.hpp"
#include "svgplot.hpp"

namespace crisp::tools {

KvConfig fsc_keys() {
  return KvConfig({
      {"half1", "", "first half-map (cubic MRC)", true},
      {"half2", "", "second half-map (cubic MRC)", true},
      {"output", "", "shell curve CSV", true},
      {"threshold", "0.143", "correlation threshold for the resolution estimate", false},
      {"mask", "", "real-space mask volume applied to both halves", false},
      {"plot", "", "FSC curve SVG", false},
  });
}

void run_fsc(const KvConfig& cfg) {
  Volume3D a = read_mrc_volume(cfg.get_string("half1"));
  Volume3D b = read_mrc_volume(cfg.get_string("half2"));

  if (cfg.has("mask")) {
    const Volume3D mask = read_mrc_volume(cfg.get_string("mask"));
    if (mask.side != a.side) throw ShapeError("mask size does not match the half-maps");
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
      a.data[i] *= mask.data[i];
      b.data[i] *= mask.data[i];
    }
  }

  const FscCurve curve = fsc(a, b);
  const double threshold = cfg.get_double("threshold");
  const ResolutionEstimate res = resolution_at(curve, threshold);

  CsvTable table;
  table.header = {"shell", "frequency", "correlation", "zero_energy"};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.shells.size(); ++i) {
    const FscShell& s = curve.shells[i];
    table.rows.push_back({std::to_string(i + 1), format_double(s.frequency, 6),
                          format_double(s.correlation, 6), s.zero_energy ? "1" : "0"});
    xs.push_back(s.frequency);
    ys.push_back(s.correlation);
  }
  const std::string out_path = cfg.get_string("output");
  write_csv(out_path, table);

  if (cfg.has("plot")) {
    write_svg_plot(cfg.get_string("plot"), "Fourier shell correlation", "frequency (1/A)",
                   "correlation", xs, ys, true, threshold);
  }

  cfg.write_effective(out_path + ".config.txt", "fsc");
  std::cout << "fsc: resolution_angstrom=" << format_double(res.resolution, 6)
            << " crossed=" << (res.crossed ? 1 : 0) << " shells=" << curve.shells.size()
            << " -> " << out_path << "\n";
}

}  // namespace crisp::tools
