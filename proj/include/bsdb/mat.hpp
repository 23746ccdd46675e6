#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include "bsdb/errors.hpp"

namespace bsdb {

/// Dense row-major matrix of doubles. Used both for image frames (H x W)
/// and for the small square matrices of the spectral machinery.
class Mat {
public:
  Mat() = default;

  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        v_(static_cast<std::size_t>(check_dims(rows, cols)) * cols, fill) {}

  Mat(int rows, int cols, std::initializer_list<double> values)
      : Mat(rows, cols) {
    if (values.size() != v_.size())
      throw ShapeError("Mat initializer has " + std::to_string(values.size()) +
                       " values, expected " + std::to_string(v_.size()));
    std::copy(values.begin(), values.end(), v_.begin());
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double& operator()(int r, int c) {
    return v_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return v_[static_cast<std::size_t>(r) * cols_ + c];
  }

  /// Flat row-major storage; for an image frame this is its frame-vector.
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  bool same_shape(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && v_ == other.v_;
  }

private:
  static int check_dims(int rows, int cols) {
    if (rows < 0 || cols < 0)
      throw ParameterError("negative matrix dimensions");
    return rows;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

inline double min_value(const Mat& m) {
  double lo = std::numeric_limits<double>::infinity();
  for (double x : m.data()) lo = std::min(lo, x);
  return lo;
}

inline double max_value(const Mat& m) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : m.data()) hi = std::max(hi, x);
  return hi;
}

/// a - b, elementwise.
inline Mat subtract(const Mat& a, const Mat& b) {
  if (!a.same_shape(b))
    throw ShapeError("subtract: shapes differ (" + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                     ")");
  Mat out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

/// max(x, 0) elementwise.
inline Mat clamp_non_negative(Mat m) {
  for (double& x : m.data()) x = std::max(x, 0.0);
  return m;
}

inline void add_in_place(Mat& acc, const Mat& m) {
  if (!acc.same_shape(m)) throw ShapeError("add_in_place: shapes differ");
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += m.data()[i];
}

/// Affine rescale of [min, max] onto [0, 255]. A constant input maps to all
/// zeros: a flat frame carries no contrast and zero is the identity for the
/// downstream subtraction. A frame already spanning exactly [0, 255] is
/// returned unchanged, which makes the operation idempotent.
inline Mat normalize_0_255(const Mat& frame) {
  const double lo = min_value(frame);
  const double hi = max_value(frame);
  if (lo == 0.0 && hi == 255.0) return frame;
  Mat out(frame.rows(), frame.cols());
  if (!(hi > lo)) return out;
  const double range = hi - lo;
  for (std::size_t i = 0; i < frame.size(); ++i)
    out.data()[i] = (frame.data()[i] - lo) / range * 255.0;
  return out;
}

} // namespace bsdb
