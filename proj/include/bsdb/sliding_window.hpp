#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsdb/errors.hpp"
#include "bsdb/spectral.hpp"

namespace bsdb {

/// The m most recent frames together with their kernel matrix, maintained
/// incrementally: a slide drops the outgoing frame's kernel row/column and
/// computes one new row/column for the incoming frame at the frozen scale.
/// The cached kernel is bit-identical to a full rebuild at all times.
class SlidingWindow {
public:
  SlidingWindow(std::vector<Mat> frames, double epsilon)
      : frames_(std::move(frames)) {
    if (frames_.size() < 2)
      throw ParameterError("sliding window needs m >= 2, got " +
                           std::to_string(frames_.size()));
    kernel_ = gaussian_kernel(
        std::span<const Mat>(frames_.data(), frames_.size()), epsilon);
  }

  int size() const { return static_cast<int>(frames_.size()); }
  double epsilon() const { return kernel_.epsilon; }
  const KernelMatrix& kernel() const { return kernel_; }
  std::span<const Mat> frames() const {
    return std::span<const Mat>(frames_.data(), frames_.size());
  }

  /// Advance by one frame.
  void slide(const Mat& incoming) {
    if (!incoming.same_shape(frames_.front()))
      throw ShapeError("incoming frame is " + std::to_string(incoming.rows()) +
                       "x" + std::to_string(incoming.cols()) + ", window holds " +
                       std::to_string(frames_.front().rows()) + "x" +
                       std::to_string(frames_.front().cols()));
    const int m = size();

    // Shift the surviving (m-1)x(m-1) kernel block up-left.
    Mat w(m, m);
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < m; ++j) w(i - 1, j - 1) = kernel_.w(i, j);

    frames_.erase(frames_.begin());
    frames_.push_back(incoming);

    w(m - 1, m - 1) = 1.0;
    for (int j = 0; j < m - 1; ++j) {
      const double e =
          detail::kernel_entry(frames_[j], frames_[m - 1], kernel_.epsilon);
      w(j, m - 1) = e;
      w(m - 1, j) = e;
    }
    kernel_.w = std::move(w);
  }

private:
  std::vector<Mat> frames_;
  KernelMatrix kernel_;
};

} // namespace bsdb
