#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "bsdb/datacube.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/mask.hpp"

namespace bsdb {

struct BlockRect {
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

/// Overlapping decomposition of a frame into a grid of near-equal blocks.
/// Adjacent blocks share exactly `overlap` pixels along their common edge;
/// every pixel belongs to at least one block.
struct BlockLayout {
  int frame_rows = 0;
  int frame_cols = 0;
  int grid_rows = 1;
  int grid_cols = 1;
  int overlap = 0;
  std::vector<BlockRect> blocks;
};

namespace detail {

/// Base cut points, then each interior edge extended by overlap/2 on one
/// side and overlap - overlap/2 on the other. Every final block must be at
/// least twice the overlap wide so neighboring overlap regions stay
/// disjoint.
inline void block_spans(int extent, int grid, int overlap,
                        std::vector<int>& starts, std::vector<int>& sizes) {
  std::vector<int> cuts(grid + 1);
  for (int k = 0; k <= grid; ++k)
    cuts[k] = static_cast<int>(
        std::lround(static_cast<double>(extent) * k / grid));
  starts.resize(grid);
  sizes.resize(grid);
  for (int k = 0; k < grid; ++k) {
    const int lo = cuts[k] - (k > 0 ? overlap / 2 : 0);
    const int hi = cuts[k + 1] + (k < grid - 1 ? overlap - overlap / 2 : 0);
    starts[k] = lo;
    sizes[k] = hi - lo;
    if (grid > 1 && sizes[k] < 2 * overlap)
      throw ParameterError(
          "overlap " + std::to_string(overlap) + " too large for block of " +
          std::to_string(sizes[k]) + " pixels (need blocks >= 2x overlap)");
  }
}

[[noreturn]] inline void rethrow_tagged(int block_id, const BlockRect& rect,
                                        std::exception_ptr ep) {
  const std::string tag = "block " + std::to_string(block_id) + " at (" +
                          std::to_string(rect.row0) + "," +
                          std::to_string(rect.col0) + "): ";
  try {
    std::rethrow_exception(ep);
  } catch (const ParameterError& e) {
    throw ParameterError(tag + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(tag + e.what());
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const NumericError& e) {
    throw NumericError(tag + e.what());
  } catch (const std::exception& e) {
    throw Error(tag + e.what());
  }
}

} // namespace detail

inline BlockLayout make_layout(int rows, int cols, int grid_rows,
                               int grid_cols, int overlap) {
  if (rows < 1 || cols < 1)
    throw ParameterError("frame dimensions must be positive");
  if (grid_rows < 1 || grid_cols < 1)
    throw ParameterError("block grid dimensions must be >= 1");
  if (overlap < 0) throw ParameterError("overlap must be >= 0");

  BlockLayout layout;
  layout.frame_rows = rows;
  layout.frame_cols = cols;
  layout.grid_rows = grid_rows;
  layout.grid_cols = grid_cols;
  layout.overlap = overlap;

  std::vector<int> row_starts, row_sizes, col_starts, col_sizes;
  detail::block_spans(rows, grid_rows, overlap, row_starts, row_sizes);
  detail::block_spans(cols, grid_cols, overlap, col_starts, col_sizes);
  for (int i = 0; i < grid_rows; ++i)
    for (int j = 0; j < grid_cols; ++j)
      layout.blocks.push_back(
          {row_starts[i], col_starts[j], row_sizes[i], col_sizes[j]});
  return layout;
}

inline Mat crop(const Mat& frame, const BlockRect& rect) {
  if (rect.row0 < 0 || rect.col0 < 0 || rect.row0 + rect.rows > frame.rows() ||
      rect.col0 + rect.cols > frame.cols())
    throw ShapeError("crop rectangle exceeds frame bounds");
  Mat out(rect.rows, rect.cols);
  for (int r = 0; r < rect.rows; ++r)
    for (int c = 0; c < rect.cols; ++c)
      out(r, c) = frame(rect.row0 + r, rect.col0 + c);
  return out;
}

inline Datacube crop(const Datacube& cube, const BlockRect& rect) {
  if (rect.row0 < 0 || rect.col0 < 0 || rect.row0 + rect.rows > cube.rows ||
      rect.col0 + rect.cols > cube.cols)
    throw ShapeError("crop rectangle exceeds frame bounds");
  Datacube out(rect.rows, rect.cols, cube.channels, cube.frame_count());
  for (int t = 0; t < cube.frame_count(); ++t) {
    for (int c = 0; c < cube.channels; ++c) {
      const Mat& src = cube.plane(t, c);
      Mat& dst = out.plane(t, c);
      for (int r = 0; r < rect.rows; ++r)
        for (int k = 0; k < rect.cols; ++k)
          dst(r, k) = src(rect.row0 + r, rect.col0 + k);
    }
  }
  return out;
}

/// A per-block mask pipeline: one binary mask per input frame. The second
/// argument is the block index within the layout, for pipelines that carry
/// per-block state (for example a cropped model).
using BlockPipeline =
    std::function<std::vector<BinaryMask>(const Datacube&, int)>;

/// Run the pipeline independently on every block (each block picks its own
/// scale and thresholds from its cropped cube) and stitch results at the
/// original coordinates, OR-ing overlap pixels. The stitch happens after
/// all blocks finish and is ordered, so the output does not depend on the
/// number of workers or their scheduling.
inline std::vector<BinaryMask> run_blocked(const Datacube& cube,
                                           const BlockLayout& layout,
                                           const BlockPipeline& pipeline,
                                           int workers = 1) {
  if (layout.frame_rows != cube.rows || layout.frame_cols != cube.cols)
    throw ShapeError("layout built for " + std::to_string(layout.frame_rows) +
                     "x" + std::to_string(layout.frame_cols) +
                     ", cube frames are " + std::to_string(cube.rows) + "x" +
                     std::to_string(cube.cols));
  if (workers < 1) throw ParameterError("workers must be >= 1");
  const int n_blocks = static_cast<int>(layout.blocks.size());
  const int n_frames = cube.frame_count();

  std::vector<std::vector<BinaryMask>> block_masks(n_blocks);
  std::vector<std::exception_ptr> block_errors(n_blocks);

  auto run_one = [&](int b) {
    try {
      Datacube sub = crop(cube, layout.blocks[b]);
      std::vector<BinaryMask> masks = pipeline(sub, b);
      if (static_cast<int>(masks.size()) != n_frames)
        throw ShapeError("pipeline returned " + std::to_string(masks.size()) +
                         " masks for " + std::to_string(n_frames) + " frames");
      for (const BinaryMask& mask : masks)
        if (mask.rows != layout.blocks[b].rows ||
            mask.cols != layout.blocks[b].cols)
          throw ShapeError("pipeline mask dimensions do not match the block");
      block_masks[b] = std::move(masks);
    } catch (...) {
      block_errors[b] = std::current_exception();
    }
  };

  if (workers == 1 || n_blocks == 1) {
    for (int b = 0; b < n_blocks; ++b) run_one(b);
  } else {
    std::atomic<int> next{0};
    const int pool = std::min(workers, n_blocks);
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int w = 0; w < pool; ++w)
      threads.emplace_back([&]() {
        for (int b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
          run_one(b);
      });
    for (std::thread& t : threads) t.join();
  }

  for (int b = 0; b < n_blocks; ++b)
    if (block_errors[b])
      detail::rethrow_tagged(b, layout.blocks[b], block_errors[b]);

  std::vector<BinaryMask> out(n_frames, BinaryMask(cube.rows, cube.cols));
  for (int b = 0; b < n_blocks; ++b) {
    const BlockRect& rect = layout.blocks[b];
    for (int t = 0; t < n_frames; ++t) {
      const BinaryMask& src = block_masks[b][t];
      BinaryMask& dst = out[t];
      for (int r = 0; r < rect.rows; ++r)
        for (int c = 0; c < rect.cols; ++c)
          dst.at(rect.row0 + r, rect.col0 + c) |= src.at(r, c);
    }
  }
  return out;
}

/// Convenience overload for pipelines that do not care about the block id.
inline std::vector<BinaryMask> run_blocked(
    const Datacube& cube, const BlockLayout& layout,
    const std::function<std::vector<BinaryMask>(const Datacube&)>& pipeline,
    int workers = 1) {
  return run_blocked(
      cube, layout,
      [&pipeline](const Datacube& sub, int) { return pipeline(sub); },
      workers);
}

} // namespace bsdb
