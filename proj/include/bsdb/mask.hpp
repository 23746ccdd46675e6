#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bsdb/errors.hpp"

namespace bsdb {

/// H x W boolean foreground map, 1 = foreground.
struct BinaryMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int rows_, int cols_)
      : rows(rows_), cols(cols_),
        bits(static_cast<std::size_t>(rows_) * cols_, 0) {}

  std::uint8_t& at(int r, int c) {
    return bits[static_cast<std::size_t>(r) * cols + c];
  }
  std::uint8_t at(int r, int c) const {
    return bits[static_cast<std::size_t>(r) * cols + c];
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }

  bool operator==(const BinaryMask& other) const {
    return rows == other.rows && cols == other.cols && bits == other.bits;
  }
};

namespace detail {

inline void check_same_dims(const BinaryMask& a, const BinaryMask& b,
                            const char* op) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw ShapeError(std::string(op) + ": mask dimensions differ (" +
                     std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     " vs " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols) + ")");
}

} // namespace detail

/// Combine a sparse-but-reliable detection (gray_mask) with a dense-but-noisy
/// one (rgb_mask). Every gray foreground pixel not yet reached seeds a
/// depth-first traversal over the rgb foreground pixels under 8-connectivity;
/// the output is everything the traversals touch, seeds included. Uses an
/// explicit stack so full-frame masks at any size cannot overflow.
inline BinaryMask dfs_fuse(const BinaryMask& gray_mask,
                           const BinaryMask& rgb_mask) {
  detail::check_same_dims(gray_mask, rgb_mask, "dfs_fuse");
  const int rows = gray_mask.rows;
  const int cols = gray_mask.cols;
  BinaryMask out(rows, cols);
  std::vector<std::pair<int, int>> stack;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!gray_mask.at(r, c) || out.at(r, c)) continue;
      out.at(r, c) = 1;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        const auto [pr, pc] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = pr + dr;
            const int nc = pc + dc;
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            if (out.at(nr, nc) || !rgb_mask.at(nr, nc)) continue;
            out.at(nr, nc) = 1;
            stack.emplace_back(nr, nc);
          }
        }
      }
    }
  }
  return out;
}

/// Delete 4-connected foreground islands with fewer than min_size pixels.
inline BinaryMask speckle_removal(const BinaryMask& mask, int min_size = 8) {
  const int rows = mask.rows;
  const int cols = mask.cols;
  BinaryMask out(rows, cols);
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  std::vector<std::pair<int, int>> stack;
  std::vector<std::pair<int, int>> component;
  constexpr int kDr[4] = {-1, 1, 0, 0};
  constexpr int kDc[4] = {0, 0, -1, 1};

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!mask.at(r, c) || seen[static_cast<std::size_t>(r) * cols + c])
        continue;
      component.clear();
      seen[static_cast<std::size_t>(r) * cols + c] = 1;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        const auto [pr, pc] = stack.back();
        stack.pop_back();
        component.emplace_back(pr, pc);
        for (int k = 0; k < 4; ++k) {
          const int nr = pr + kDr[k];
          const int nc = pc + kDc[k];
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          const std::size_t idx = static_cast<std::size_t>(nr) * cols + nc;
          if (seen[idx] || !mask.at(nr, nc)) continue;
          seen[idx] = 1;
          stack.emplace_back(nr, nc);
        }
      }
      if (static_cast<int>(component.size()) >= min_size)
        for (const auto& [cr, cc] : component) out.at(cr, cc) = 1;
    }
  }
  return out;
}

struct MaskMetrics {
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Set-overlap scores. Empty-vs-empty counts as a perfect match.
inline MaskMetrics mask_metrics(const BinaryMask& predicted,
                                const BinaryMask& truth) {
  detail::check_same_dims(predicted, truth, "mask_metrics");
  std::size_t tp = 0, pred = 0, pos = 0;
  for (std::size_t i = 0; i < predicted.bits.size(); ++i) {
    pred += predicted.bits[i];
    pos += truth.bits[i];
    tp += predicted.bits[i] & truth.bits[i];
  }
  const std::size_t uni = pred + pos - tp;
  MaskMetrics m;
  m.iou = uni == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(uni);
  m.precision =
      pred == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(pred);
  m.recall =
      pos == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(pos);
  return m;
}

inline BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  detail::check_same_dims(a, b, "mask_or");
  BinaryMask out = a;
  for (std::size_t i = 0; i < out.bits.size(); ++i)
    out.bits[i] = out.bits[i] | b.bits[i];
  return out;
}

} // namespace bsdb
