#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "crisp/csv.hpp"
#include "crisp/errors.hpp"
#include "crisp/mrc.hpp"
#include "crisp/parallel.hpp"
#include "crisp/star.hpp"
#include "crisp/synth.hpp"

namespace crisp::tools {

namespace {

std::string indexed(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.%s", stem, i, ext);
  return buf;
}

double variance(const std::vector<float>& v) {
  double sum = 0.0;
  for (float x : v) sum += x;
  const double mean = sum / v.size();
  double var = 0.0;
  for (float x : v) {
    const double d = x - mean;
    var += d * d;
  }
  return var / v.size();
}

}  // namespace

KvConfig synth_keys() {
  return KvConfig({
      {"volume", "", "cubic MRC volume to project", true},
      {"out_dir", "", "output directory (created if missing)", true},
      {"count", "5", "number of micrographs", false},
      {"size", "1024", "micrograph side in pixels", false},
      {"particles", "100", "particles per micrograph", false},
      {"snr", "0.005", "target variance ratio var(signal)/var(noise)", false},
      {"defocus_pool", "1.0,1.5,2.0,2.5", "defocus values (um) sampled per micrograph",
       false},
      {"voltage_kv", "300", "acceleration voltage (kV)", false},
      {"cs_mm", "2.7", "spherical aberration (mm)", false},
      {"amplitude_contrast", "0.1", "amplitude contrast fraction", false},
      {"apply_ctf", "true", "modulate projections by the CTF", false},
      {"min_separation", "0", "minimum center distance in px (0 = volume side)", false},
      {"seed", "0", "base RNG seed", false},
      {"threads", "0", "worker threads (0 = CRISP_THREADS or hardware)", false},
  });
}

void run_synth(const KvConfig& cfg) {
  const Volume3D vol = read_mrc_volume(cfg.get_string("volume"));

  SynthConfig sc;
  sc.micrograph_size = cfg.get_int("size");
  sc.particles = cfg.get_int("particles");
  sc.snr = cfg.get_float("snr");
  sc.defocus_pool_um.clear();
  for (double d : cfg.get_doubles("defocus_pool")) {
    sc.defocus_pool_um.push_back(static_cast<float>(d));
  }
  sc.ctf.voltage_kv = cfg.get_float("voltage_kv");
  sc.ctf.cs_mm = cfg.get_float("cs_mm");
  sc.ctf.amplitude_contrast = cfg.get_float("amplitude_contrast");
  sc.apply_ctf = cfg.get_bool("apply_ctf");
  sc.min_separation = cfg.get_int("min_separation");
  sc.seed = cfg.get_u64("seed");

  const int count = cfg.get_int("count");
  if (count <= 0) throw ConfigError("count must be > 0");
  const int threads = resolve_threads(cfg.get_int("threads"));

  const std::filesystem::path out_dir(cfg.get_string("out_dir"));
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create out_dir: " + out_dir.string());

  std::vector<SyntheticMicrograph> made(count);
  parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t i) {
    made[i] = make_micrograph(vol, sc, i);
  });

  CsvTable manifest;
  manifest.header = {"index",      "micrograph", "labels",      "centers",
                     "defocus_um", "snr_target", "snr_measured", "particles"};
  for (int i = 0; i < count; ++i) {
    const SyntheticMicrograph& m = made[i];
    const std::string mrc_name = indexed("micrograph", i, "mrc");
    const std::string lbl_name = indexed("labels", i, "mrc");
    const std::string star_name = indexed("picks", i, "star");

    write_mrc((out_dir / mrc_name).string(), m.micrograph);

    Image2D lbl(m.labels.width, m.labels.height, m.micrograph.pixel_size);
    for (std::size_t p = 0; p < m.labels.labels.size(); ++p) {
      lbl.data[p] = m.labels.labels[p] ? 1.0f : 0.0f;
    }
    write_mrc((out_dir / lbl_name).string(), lbl);

    PickSet truth;
    truth.centers = m.centers;
    truth.box_width = static_cast<float>(vol.side);
    truth.box_height = static_cast<float>(vol.side);
    write_star((out_dir / star_name).string(), star_rows(truth, mrc_name));

    // Realized SNR from the residual the generator actually added.
    std::vector<float> noise(m.micrograph.data.size());
    for (std::size_t p = 0; p < noise.size(); ++p) {
      noise[p] = m.micrograph.data[p] - m.clean.data[p];
    }
    const double measured = variance(m.clean.data) / variance(noise);

    manifest.rows.push_back({std::to_string(i), mrc_name, lbl_name, star_name,
                             format_double(m.defocus_um, 6), format_double(sc.snr, 6),
                             format_double(measured, 6),
                             std::to_string(m.centers.size())});
    std::cout << "synth: wrote " << mrc_name << " (particles=" << m.centers.size()
              << " defocus_um=" << format_double(m.defocus_um, 2) << ")\n";
  }
  write_csv((out_dir / "manifest.csv").string(), manifest);
  cfg.write_effective((out_dir / "synth.config.txt").string(), "synth");
  std::cout << "synth: manifest.csv with " << count << " rows\n";
}

}  // namespace crisp::tools
