#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "bsdb/datacube.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/mask.hpp"
#include "bsdb/mat.hpp"

namespace bsdb {

namespace detail {

inline std::uint8_t to_byte(double v) {
  const long r = std::lround(v);
  return static_cast<std::uint8_t>(std::min(255L, std::max(0L, r)));
}

inline int read_pnm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comment lines between header tokens.
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  if (!(in >> value) || value < 0)
    throw IoError("malformed image header in " + path);
  return value;
}

} // namespace detail

/// Write planes as binary PGM (1 plane) or PPM (3 planes), 8 bits per
/// sample. Values are rounded and clamped to [0, 255].
inline void write_image(const std::string& path,
                        const std::vector<const Mat*>& planes) {
  if (planes.size() != 1 && planes.size() != 3)
    throw ParameterError("write_image takes 1 or 3 planes");
  const Mat& first = *planes[0];
  for (const Mat* p : planes)
    if (!p->same_shape(first)) throw ShapeError("image planes differ in shape");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << (planes.size() == 1 ? "P5\n" : "P6\n")
      << first.cols() << " " << first.rows() << "\n255\n";
  std::vector<std::uint8_t> row;
  for (int r = 0; r < first.rows(); ++r) {
    row.clear();
    for (int c = 0; c < first.cols(); ++c)
      for (const Mat* p : planes) row.push_back(detail::to_byte((*p)(r, c)));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("short write to " + path);
}

inline void write_pgm(const std::string& path, const Mat& frame) {
  write_image(path, {&frame});
}

inline void write_ppm(const std::string& path, const Mat& r, const Mat& g,
                      const Mat& b) {
  write_image(path, {&r, &g, &b});
}

/// Read a binary PGM/PPM into 1 or 3 planes of doubles in [0, 255].
inline std::vector<Mat> read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  int channels;
  if (magic[0] == 'P' && magic[1] == '5') channels = 1;
  else if (magic[0] == 'P' && magic[1] == '6') channels = 3;
  else throw IoError("unsupported image format in " + path +
                     " (expected binary PGM/PPM)");

  const int cols = detail::read_pnm_token(in, path);
  const int rows = detail::read_pnm_token(in, path);
  const int maxval = detail::read_pnm_token(in, path);
  if (maxval <= 0 || maxval > 255)
    throw IoError("unsupported sample depth " + std::to_string(maxval) +
                  " in " + path);
  in.get(); // single whitespace after maxval

  std::vector<std::uint8_t> raw(static_cast<std::size_t>(rows) * cols *
                                channels);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw IoError("truncated image data in " + path);

  std::vector<Mat> planes(channels, Mat(rows, cols));
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      for (int ch = 0; ch < channels; ++ch)
        planes[ch](r, c) = static_cast<double>(raw[k++]);
  return planes;
}

/// Mask file format: 8-bit single-channel image, 0 = background,
/// 255 = foreground.
inline void write_mask(const std::string& path, const BinaryMask& mask) {
  Mat frame(mask.rows, mask.cols);
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    frame.data()[i] = mask.bits[i] ? 255.0 : 0.0;
  write_pgm(path, frame);
}

inline BinaryMask read_mask(const std::string& path) {
  const std::vector<Mat> planes = read_image(path);
  if (planes.size() != 1)
    throw IoError("mask file " + path + " must be single-channel");
  BinaryMask mask(planes[0].rows(), planes[0].cols());
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    mask.bits[i] = planes[0].data()[i] >= 128.0 ? 1 : 0;
  return mask;
}

/// A directory of frames named by a printf-style pattern with one integer
/// conversion ("frame_%06d.pgm"), contiguous from index 0.
struct SequenceManifest {
  std::string directory;
  std::string pattern = "frame_%06d.pgm";
  int channels = 1;
  /// Optional ground-truth mask pattern in the same directory.
  std::string truth_pattern;
};

inline std::string frame_filename(const std::string& pattern, int index) {
  const std::size_t pos = pattern.find('%');
  if (pos == std::string::npos || pattern.find('%', pos + 1) != std::string::npos)
    throw ParameterError("pattern must contain exactly one % conversion: " +
                         pattern);
  std::size_t end = pos + 1;
  while (end < pattern.size() &&
         std::isdigit(static_cast<unsigned char>(pattern[end])))
    ++end;
  if (end >= pattern.size() || pattern[end] != 'd')
    throw ParameterError("pattern conversion must be %d or %0<width>d: " +
                         pattern);
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
  return buf;
}

namespace detail {

/// Indices present in the directory must be 0..k-1 with no holes; a hole
/// followed by a later index is reported by name.
inline int contiguous_frame_count(const std::string& directory,
                                  const std::string& pattern) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw IoError("not a directory: " + directory);
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(directory))
    names.insert(entry.path().filename().string());

  int count = 0;
  while (names.count(frame_filename(pattern, count))) ++count;
  const int limit = count + static_cast<int>(names.size()) + 1;
  for (int j = count + 1; j <= limit; ++j) {
    if (names.count(frame_filename(pattern, j)))
      throw IoError("missing frame index " + std::to_string(count) + " in " +
                    directory + " (found " + frame_filename(pattern, j) + ")");
  }
  return count;
}

} // namespace detail

inline Datacube load_sequence(const SequenceManifest& manifest) {
  const int n =
      detail::contiguous_frame_count(manifest.directory, manifest.pattern);
  if (n == 0)
    throw IoError("no frames matching \"" + manifest.pattern + "\" in " +
                  manifest.directory);
  Datacube cube;
  for (int t = 0; t < n; ++t) {
    const std::string path = (std::filesystem::path(manifest.directory) /
                              frame_filename(manifest.pattern, t))
                                 .string();
    std::vector<Mat> planes = read_image(path);
    if (t == 0) {
      if (static_cast<int>(planes.size()) != manifest.channels)
        throw ShapeError("frame 0 has " + std::to_string(planes.size()) +
                         " channel(s), manifest expects " +
                         std::to_string(manifest.channels));
      cube = Datacube(planes[0].rows(), planes[0].cols(),
                      static_cast<int>(planes.size()), n);
    }
    if (static_cast<int>(planes.size()) != cube.channels ||
        planes[0].rows() != cube.rows || planes[0].cols() != cube.cols)
      throw ShapeError("frame " + std::to_string(t) +
                       " dimensions do not match frame 0 in " +
                       manifest.directory);
    for (int c = 0; c < cube.channels; ++c)
      cube.plane(t, c) = std::move(planes[c]);
  }
  return cube;
}

inline std::vector<BinaryMask> load_truth_masks(
    const SequenceManifest& manifest) {
  if (manifest.truth_pattern.empty())
    throw ParameterError("manifest has no truth pattern");
  const int n = detail::contiguous_frame_count(manifest.directory,
                                               manifest.truth_pattern);
  std::vector<BinaryMask> masks;
  masks.reserve(n);
  for (int t = 0; t < n; ++t)
    masks.push_back(read_mask((std::filesystem::path(manifest.directory) /
                               frame_filename(manifest.truth_pattern, t))
                                  .string()));
  return masks;
}

inline void save_sequence(const std::string& directory,
                          const std::string& pattern, const Datacube& cube) {
  std::filesystem::create_directories(directory);
  for (int t = 0; t < cube.frame_count(); ++t) {
    const std::string path =
        (std::filesystem::path(directory) / frame_filename(pattern, t))
            .string();
    if (cube.channels == 1) write_pgm(path, cube.plane(t));
    else write_ppm(path, cube.plane(t, 0), cube.plane(t, 1), cube.plane(t, 2));
  }
}

inline void save_masks(const std::string& directory,
                       const std::string& pattern,
                       const std::vector<BinaryMask>& masks) {
  std::filesystem::create_directories(directory);
  for (std::size_t t = 0; t < masks.size(); ++t)
    write_mask((std::filesystem::path(directory) /
                frame_filename(pattern, static_cast<int>(t)))
                   .string(),
               masks[t]);
}

} // namespace bsdb
