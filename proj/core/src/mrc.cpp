#include "crisp/mrc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "crisp/errors.hpp"

namespace crisp {

namespace {

constexpr std::size_t kHeaderBytes = 1024;

// Word offsets (4-byte units) into the 1024-byte header.
constexpr int kWordNx = 0;
constexpr int kWordMode = 3;
constexpr int kWordMx = 7;
constexpr int kWordCellA = 10;
constexpr int kWordDmin = 19;
constexpr int kWordIspg = 22;
constexpr int kWordNsymbt = 23;
constexpr int kWordOrigin = 49;
constexpr int kWordMap = 52;
constexpr int kWordMachst = 53;
constexpr int kWordRms = 54;
constexpr int kWordNlabl = 55;

void put_i32(unsigned char* h, int word, std::int32_t v) {
  std::memcpy(h + 4 * word, &v, 4);
}

void put_f32(unsigned char* h, int word, float v) { std::memcpy(h + 4 * word, &v, 4); }

std::int32_t get_i32(const unsigned char* h, int word, bool swap) {
  std::int32_t v;
  std::memcpy(&v, h + 4 * word, 4);
  if (swap) v = __builtin_bswap32(v);
  return v;
}

float get_f32(const unsigned char* h, int word, bool swap) {
  std::uint32_t bits;
  std::memcpy(&bits, h + 4 * word, 4);
  if (swap) bits = __builtin_bswap32(bits);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::size_t mode_bytes(std::int32_t mode, const std::string& path) {
  switch (mode) {
    case 0: return 1;
    case 1: return 2;
    case 2: return 4;
    case 6: return 2;
    default:
      throw IoError(path + ": unsupported mode " + std::to_string(mode));
  }
}

std::vector<float> decode_data(const std::vector<unsigned char>& raw, std::int32_t mode,
                               std::size_t count, bool swap) {
  std::vector<float> out(count);
  switch (mode) {
    case 0: {
      for (std::size_t i = 0; i < count; ++i) {
        out[i] = static_cast<float>(static_cast<std::int8_t>(raw[i]));
      }
      break;
    }
    case 1: {
      for (std::size_t i = 0; i < count; ++i) {
        std::uint16_t bits;
        std::memcpy(&bits, raw.data() + 2 * i, 2);
        if (swap) bits = static_cast<std::uint16_t>((bits >> 8) | (bits << 8));
        std::int16_t v;
        std::memcpy(&v, &bits, 2);
        out[i] = static_cast<float>(v);
      }
      break;
    }
    case 2: {
      for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, raw.data() + 4 * i, 4);
        if (swap) bits = __builtin_bswap32(bits);
        float v;
        std::memcpy(&v, &bits, 4);
        out[i] = v;
      }
      break;
    }
    case 6: {
      for (std::size_t i = 0; i < count; ++i) {
        std::uint16_t v;
        std::memcpy(&v, raw.data() + 2 * i, 2);
        if (swap) v = static_cast<std::uint16_t>((v >> 8) | (v << 8));
        out[i] = static_cast<float>(v);
      }
      break;
    }
    default: break;  // unreachable, mode_bytes already threw
  }
  return out;
}

struct Stats {
  float dmin, dmax, dmean, rms;
};

Stats compute_stats(const std::vector<float>& data) {
  Stats s{0, 0, 0, 0};
  if (data.empty()) return s;
  double sum = 0.0;
  float lo = std::numeric_limits<float>::max();
  float hi = std::numeric_limits<float>::lowest();
  for (float v : data) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mean = sum / data.size();
  double var = 0.0;
  for (float v : data) {
    const double d = v - mean;
    var += d * d;
  }
  s.dmin = lo;
  s.dmax = hi;
  s.dmean = static_cast<float>(mean);
  s.rms = static_cast<float>(std::sqrt(var / data.size()));
  return s;
}

void write_file(const std::string& path, const std::vector<float>& data, int nx, int ny,
                int nz, float pixel_size, bool is_volume) {
  unsigned char header[kHeaderBytes] = {0};
  put_i32(header, kWordNx + 0, nx);
  put_i32(header, kWordNx + 1, ny);
  put_i32(header, kWordNx + 2, nz);
  put_i32(header, kWordMode, 2);
  put_i32(header, kWordMx + 0, nx);
  put_i32(header, kWordMx + 1, ny);
  put_i32(header, kWordMx + 2, nz);
  put_f32(header, kWordCellA + 0, pixel_size * nx);
  put_f32(header, kWordCellA + 1, pixel_size * ny);
  put_f32(header, kWordCellA + 2, pixel_size * nz);
  put_f32(header, kWordCellA + 3, 90.0f);  // cellb alpha/beta/gamma
  put_f32(header, kWordCellA + 4, 90.0f);
  put_f32(header, kWordCellA + 5, 90.0f);
  put_i32(header, kWordCellA + 6, 1);  // mapc
  put_i32(header, kWordCellA + 7, 2);  // mapr
  put_i32(header, kWordCellA + 8, 3);  // maps
  const Stats st = compute_stats(data);
  put_f32(header, kWordDmin + 0, st.dmin);
  put_f32(header, kWordDmin + 1, st.dmax);
  put_f32(header, kWordDmin + 2, st.dmean);
  put_i32(header, kWordIspg, is_volume ? 1 : 0);
  put_i32(header, kWordNsymbt, 0);
  put_f32(header, kWordOrigin + 0, 0.0f);
  put_f32(header, kWordOrigin + 1, 0.0f);
  put_f32(header, kWordOrigin + 2, 0.0f);
  std::memcpy(header + 4 * kWordMap, "MAP ", 4);
  const unsigned char stamp[4] = {0x44, 0x44, 0x00, 0x00};
  std::memcpy(header + 4 * kWordMachst, stamp, 4);
  put_f32(header, kWordRms, st.rms);
  put_i32(header, kWordNlabl, 0);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(header), kHeaderBytes);
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!f) throw IoError("write failed: " + path);
}

struct RawMrc {
  std::int32_t nx, ny, nz;
  float pixel_size;
  std::vector<float> data;
};

RawMrc read_raw(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);

  unsigned char header[kHeaderBytes];
  f.read(reinterpret_cast<char*>(header), kHeaderBytes);
  if (f.gcount() != static_cast<std::streamsize>(kHeaderBytes)) {
    throw IoError(path + ": truncated file (header)");
  }

  // The machine stamp decides byte order; anything but the big-endian
  // stamp is treated as little-endian (the common default).
  const unsigned char* machst = header + 4 * kWordMachst;
  const bool swap = machst[0] == 0x11 && machst[1] == 0x11;

  const std::int32_t nx = get_i32(header, kWordNx + 0, swap);
  const std::int32_t ny = get_i32(header, kWordNx + 1, swap);
  const std::int32_t nz = get_i32(header, kWordNx + 2, swap);
  const std::int32_t mode = get_i32(header, kWordMode, swap);
  const std::int32_t nsymbt = get_i32(header, kWordNsymbt, swap);
  if (nx <= 0 || ny <= 0 || nz <= 0) {
    throw IoError(path + ": invalid dimensions");
  }
  const std::size_t bytes_per = mode_bytes(mode, path);
  if (nsymbt < 0) throw IoError(path + ": negative extended header size");
  if (nsymbt > 0) f.seekg(nsymbt, std::ios::cur);

  const std::size_t count =
      static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  std::vector<unsigned char> raw(count * bytes_per);
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (f.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw IoError(path + ": truncated file (data)");
  }

  std::vector<float> data = decode_data(raw, mode, count, swap);
  require_finite(data, path.c_str());

  const std::int32_t mx = get_i32(header, kWordMx, swap);
  const float cella_x = get_f32(header, kWordCellA, swap);
  float px = 1.0f;
  if (mx > 0 && cella_x > 0.0f) px = cella_x / static_cast<float>(mx);

  return RawMrc{nx, ny, nz, px, std::move(data)};
}

}  // namespace

float MrcHeader::pixel_size() const {
  if (mx > 0 && cella_x > 0.0f) return cella_x / static_cast<float>(mx);
  return 1.0f;
}

MrcData read_mrc(const std::string& path) {
  RawMrc raw = read_raw(path);
  if (raw.nz == 1) {
    Image2D img(raw.nx, raw.ny, raw.pixel_size);
    img.data = std::move(raw.data);
    return img;
  }
  if (raw.nx == raw.ny && raw.ny == raw.nz) {
    Volume3D vol(raw.nx, raw.pixel_size);
    vol.data = std::move(raw.data);
    return vol;
  }
  throw IoError(path + ": non-cubic 3D volume (" + std::to_string(raw.nx) + "x" +
                std::to_string(raw.ny) + "x" + std::to_string(raw.nz) + ")");
}

std::vector<Image2D> read_mrc_stack(const std::string& path) {
  RawMrc raw = read_raw(path);
  const std::size_t plane =
      static_cast<std::size_t>(raw.nx) * static_cast<std::size_t>(raw.ny);
  std::vector<Image2D> sections;
  sections.reserve(static_cast<std::size_t>(raw.nz));
  for (std::int32_t z = 0; z < raw.nz; ++z) {
    Image2D img(raw.nx, raw.ny, raw.pixel_size);
    std::copy_n(raw.data.begin() + static_cast<std::ptrdiff_t>(plane * z), plane,
                img.data.begin());
    sections.push_back(std::move(img));
  }
  return sections;
}

Image2D read_mrc_image(const std::string& path) {
  MrcData d = read_mrc(path);
  if (auto* img = std::get_if<Image2D>(&d)) return std::move(*img);
  throw IoError(path + ": expected a 2D image, found a volume");
}

Volume3D read_mrc_volume(const std::string& path) {
  MrcData d = read_mrc(path);
  if (auto* vol = std::get_if<Volume3D>(&d)) return std::move(*vol);
  throw IoError(path + ": expected a 3D volume, found a 2D image");
}

void write_mrc(const std::string& path, const Image2D& img) {
  if (img.width <= 0 || img.height <= 0) throw ConfigError("write_mrc: empty image");
  require_finite(img.data, "write_mrc image");
  write_file(path, img.data, img.width, img.height, 1, img.pixel_size, false);
}

void write_mrc(const std::string& path, const Volume3D& vol) {
  if (vol.side <= 0) throw ConfigError("write_mrc: empty volume");
  require_finite(vol.data, "write_mrc volume");
  write_file(path, vol.data, vol.side, vol.side, vol.side, vol.pixel_size, true);
}

}  // namespace crisp
