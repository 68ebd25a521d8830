#ifndef CRISP_MRC_HPP
#define CRISP_MRC_HPP

#include <cstdint>
#include <string>
#include <variant>

#include "crisp/image.hpp"

namespace crisp {

// The fixed 1024-byte MRC2014 header. Only the fields the pipeline needs
// are interpreted; the rest are preserved as zeros on write.
struct MrcHeader {
  std::int32_t nx = 0;        // columns (fastest axis)
  std::int32_t ny = 0;        // rows
  std::int32_t nz = 0;        // sections (1 for 2D images)
  std::int32_t mode = 2;      // 0 int8, 1 int16, 2 float32, 6 uint16
  std::int32_t mx = 0, my = 0, mz = 0;  // sampling grid, equals nx/ny/nz here
  float cella_x = 0, cella_y = 0, cella_z = 0;  // cell dimensions in Angstrom
  float dmin = 0, dmax = 0, dmean = 0;          // density statistics
  std::int32_t ispg = 0;      // space group: 0 image, 1 volume
  std::int32_t nsymbt = 0;    // bytes of extended header
  float rms = 0;              // rms deviation from mean
  char map[4] = {'M', 'A', 'P', ' '};
  unsigned char machst[4] = {0x44, 0x44, 0x00, 0x00};  // little-endian stamp

  float pixel_size() const;   // cella_x / mx, 1.0 when unset
};

using MrcData = std::variant<Image2D, Volume3D>;

// Reads an MRC file. nz == 1 yields an Image2D; nz == nx == ny yields a
// Volume3D; other 3D shapes are rejected. Modes 0, 1 and 6 are converted
// to float32; anything else fails with "unsupported mode N". Big-endian
// files (machine stamp 0x11 0x11) are byte-swapped on load.
MrcData read_mrc(const std::string& path);

// Convenience wrappers that additionally check the dimensionality.
Image2D read_mrc_image(const std::string& path);
Volume3D read_mrc_volume(const std::string& path);

// Reads an MRC stack (nz sections of nx x ny) as one image per section.
// Unlike read_mrc this places no shape constraint on nz.
std::vector<Image2D> read_mrc_stack(const std::string& path);

// Writes mode-2 (float32) little-endian MRC with a deterministic header:
// density statistics are computed from the data, labels are left empty and
// no timestamps are stored, so identical data produces identical bytes.
void write_mrc(const std::string& path, const Image2D& img);
void write_mrc(const std::string& path, const Volume3D& vol);

}  // namespace crisp

#endif
