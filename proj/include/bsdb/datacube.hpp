#pragma once

#include <string>
#include <vector>

#include "bsdb/errors.hpp"
#include "bsdb/mat.hpp"

namespace bsdb {

/// Ordered stack of video frames. Stored plane-wise: planes[t*channels + c]
/// is channel c of frame t. channels is 1 (grayscale) or 3 (RGB).
struct Datacube {
  int rows = 0;
  int cols = 0;
  int channels = 1;
  std::vector<Mat> planes;

  Datacube() = default;
  Datacube(int rows_, int cols_, int channels_, int frames)
      : rows(rows_), cols(cols_), channels(channels_) {
    if (channels != 1 && channels != 3)
      throw ParameterError("datacube channels must be 1 or 3");
    if (frames < 0) throw ParameterError("negative frame count");
    planes.assign(static_cast<std::size_t>(frames) * channels,
                  Mat(rows, cols));
  }

  int frame_count() const {
    return channels == 0 ? 0 : static_cast<int>(planes.size()) / channels;
  }

  Mat& plane(int t, int c = 0) {
    return planes[static_cast<std::size_t>(t) * channels + c];
  }
  const Mat& plane(int t, int c = 0) const {
    return planes[static_cast<std::size_t>(t) * channels + c];
  }
};

/// Standard luma conversion, 0.299 R + 0.587 G + 0.114 B.
inline Datacube to_grayscale(const Datacube& cube) {
  if (cube.channels != 3)
    throw ParameterError("to_grayscale expects a 3-channel cube, got " +
                         std::to_string(cube.channels) + " channel(s)");
  Datacube out(cube.rows, cube.cols, 1, cube.frame_count());
  for (int t = 0; t < cube.frame_count(); ++t) {
    const Mat& r = cube.plane(t, 0);
    const Mat& g = cube.plane(t, 1);
    const Mat& b = cube.plane(t, 2);
    Mat& gray = out.plane(t);
    for (std::size_t i = 0; i < gray.size(); ++i)
      gray.data()[i] =
          0.299 * r.data()[i] + 0.587 * g.data()[i] + 0.114 * b.data()[i];
  }
  return out;
}

/// Extract one channel as a grayscale cube.
inline Datacube channel_cube(const Datacube& cube, int c) {
  if (c < 0 || c >= cube.channels)
    throw ParameterError("channel index " + std::to_string(c) +
                         " out of range for " + std::to_string(cube.channels) +
                         " channel(s)");
  Datacube out(cube.rows, cube.cols, 1, cube.frame_count());
  for (int t = 0; t < cube.frame_count(); ++t) out.plane(t) = cube.plane(t, c);
  return out;
}

} // namespace bsdb
