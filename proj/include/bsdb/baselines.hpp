#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bsdb/config.hpp"
#include "bsdb/datacube.hpp"
#include "bsdb/eigensolver.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/mask.hpp"

namespace bsdb {

namespace detail {

inline void require_gray(const Datacube& cube, const char* op) {
  if (cube.channels != 1)
    throw ParameterError(std::string(op) + " expects a grayscale cube");
}

} // namespace detail

/// |s_t - s_{t-1}| > threshold. The first frame has no predecessor and gets
/// an empty mask.
inline std::vector<BinaryMask> frame_diff(const Datacube& cube,
                                          double threshold) {
  detail::require_gray(cube, "frame_diff");
  if (cube.frame_count() < 2)
    throw ParameterError("frame_diff needs at least 2 frames");
  std::vector<BinaryMask> masks;
  masks.reserve(cube.frame_count());
  masks.emplace_back(cube.rows, cube.cols);
  for (int t = 1; t < cube.frame_count(); ++t) {
    BinaryMask mask(cube.rows, cube.cols);
    const Mat& cur = cube.plane(t);
    const Mat& prev = cube.plane(t - 1);
    for (std::size_t i = 0; i < cur.size(); ++i)
      mask.bits[i] =
          std::fabs(cur.data()[i] - prev.data()[i]) > threshold ? 1 : 0;
    masks.push_back(std::move(mask));
  }
  return masks;
}

/// Pixels within `threshold` of the per-pixel training mean are background.
inline std::vector<BinaryMask> mean_threshold(const Datacube& train,
                                              const Datacube& test,
                                              double threshold) {
  detail::require_gray(train, "mean_threshold");
  detail::require_gray(test, "mean_threshold");
  if (train.frame_count() < 1)
    throw ParameterError("mean_threshold needs a non-empty training cube");
  if (train.rows != test.rows || train.cols != test.cols)
    throw ShapeError("training and test frame dimensions differ");

  Mat mean(train.rows, train.cols);
  for (int t = 0; t < train.frame_count(); ++t)
    add_in_place(mean, train.plane(t));
  for (double& x : mean.data()) x /= train.frame_count();

  std::vector<BinaryMask> masks;
  masks.reserve(test.frame_count());
  for (int t = 0; t < test.frame_count(); ++t) {
    BinaryMask mask(test.rows, test.cols);
    const Mat& frame = test.plane(t);
    for (std::size_t i = 0; i < frame.size(); ++i)
      mask.bits[i] =
          std::fabs(frame.data()[i] - mean.data()[i]) <= threshold ? 0 : 1;
    masks.push_back(std::move(mask));
  }
  return masks;
}

/// Background model: per-pixel lower median of the trailing window of up to
/// `window` frames ending at the current one.
inline std::vector<BinaryMask> temporal_median(const Datacube& cube,
                                               int window, double threshold) {
  detail::require_gray(cube, "temporal_median");
  if (window < 1) throw ParameterError("median window must be >= 1");
  if (cube.frame_count() < 1)
    throw ParameterError("temporal_median needs a non-empty cube");

  std::vector<BinaryMask> masks;
  masks.reserve(cube.frame_count());
  std::vector<double> values;
  for (int t = 0; t < cube.frame_count(); ++t) {
    const int lo = std::max(0, t - window + 1);
    BinaryMask mask(cube.rows, cube.cols);
    const Mat& frame = cube.plane(t);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      values.clear();
      for (int s = lo; s <= t; ++s) values.push_back(cube.plane(s).data()[i]);
      const std::size_t mid = (values.size() - 1) / 2;
      std::nth_element(values.begin(), values.begin() + mid, values.end());
      mask.bits[i] =
          std::fabs(frame.data()[i] - values[mid]) > threshold ? 1 : 0;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

/// Mean frame plus an orthonormal pixel-space basis spanning the top
/// directions of the training covariance.
struct EigenBackgroundModel {
  int rows = 0;
  int cols = 0;
  Mat mean;
  std::vector<std::vector<double>> basis;
};

/// Fit the eigen-background model. Eigenvectors come from the small n x n
/// Gram matrix (same symmetric Jacobi solver as the spectral core): for a
/// centered frame matrix X, XXt u = lambda u gives the covariance
/// eigenvector Xt u up to scale. Near-zero eigenvalues span nothing and
/// contribute a zero basis vector.
inline EigenBackgroundModel fit_eigen_background(const Datacube& train,
                                                 int eigen_count) {
  detail::require_gray(train, "eigen_background");
  if (eigen_count < 1) throw ParameterError("eigen_count must be >= 1");
  const int n = train.frame_count();
  if (n < eigen_count)
    throw ParameterError("eigen_background needs at least eigen_count=" +
                         std::to_string(eigen_count) + " training frames, got " +
                         std::to_string(n));
  const std::size_t d = train.plane(0).size();

  EigenBackgroundModel model;
  model.rows = train.rows;
  model.cols = train.cols;
  model.mean = Mat(train.rows, train.cols);
  for (int t = 0; t < n; ++t)
    for (std::size_t i = 0; i < d; ++i)
      model.mean.data()[i] += train.plane(t).data()[i];
  for (double& x : model.mean.data()) x /= n;

  std::vector<std::vector<double>> centered(n, std::vector<double>(d));
  for (int t = 0; t < n; ++t)
    for (std::size_t i = 0; i < d; ++i)
      centered[t][i] = train.plane(t).data()[i] - model.mean.data()[i];

  Mat gram(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += centered[a][i] * centered[b][i];
      gram(a, b) = s;
      gram(b, a) = s;
    }
  }
  const SymmetricEigen eig = jacobi_eigen_symmetric(gram);

  const double lambda_floor =
      1e-12 * std::max(eig.values.empty() ? 0.0 : std::fabs(eig.values[0]), 1.0);
  for (int k = 0; k < eigen_count; ++k) {
    std::vector<double> v(d, 0.0);
    if (eig.values[k] > lambda_floor) {
      for (int t = 0; t < n; ++t) {
        const double u = eig.vectors(t, k);
        for (std::size_t i = 0; i < d; ++i) v[i] += u * centered[t][i];
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    model.basis.push_back(std::move(v));
  }
  return model;
}

/// Project a frame onto the model's eigenspace and back.
inline Mat eigen_background_reconstruct(const EigenBackgroundModel& model,
                                        const Mat& frame) {
  if (frame.rows() != model.rows || frame.cols() != model.cols)
    throw ShapeError("frame dimensions do not match the model");
  Mat recon = model.mean;
  for (const std::vector<double>& v : model.basis) {
    double coeff = 0.0;
    for (std::size_t i = 0; i < frame.size(); ++i)
      coeff += (frame.data()[i] - model.mean.data()[i]) * v[i];
    for (std::size_t i = 0; i < frame.size(); ++i)
      recon.data()[i] += coeff * v[i];
  }
  return recon;
}

/// Flag pixels whose reconstruction error exceeds the threshold.
inline std::vector<BinaryMask> eigen_background(const Datacube& train,
                                                const Datacube& test,
                                                int eigen_count,
                                                double threshold) {
  detail::require_gray(test, "eigen_background");
  if (train.rows != test.rows || train.cols != test.cols)
    throw ShapeError("training and test frame dimensions differ");
  const EigenBackgroundModel model = fit_eigen_background(train, eigen_count);

  std::vector<BinaryMask> masks;
  masks.reserve(test.frame_count());
  for (int t = 0; t < test.frame_count(); ++t) {
    const Mat& frame = test.plane(t);
    const Mat recon = eigen_background_reconstruct(model, frame);
    BinaryMask mask(test.rows, test.cols);
    for (std::size_t i = 0; i < frame.size(); ++i)
      mask.bits[i] =
          std::fabs(frame.data()[i] - recon.data()[i]) > threshold ? 1 : 0;
    masks.push_back(std::move(mask));
  }
  return masks;
}

/// Dispatch on config.baseline_method. frame_diff and temporal_median model
/// the test sequence itself; the trained methods fit on `train`.
inline std::vector<BinaryMask> run_baseline(const Datacube& train,
                                            const Datacube& test,
                                            const PipelineConfig& config) {
  config.validate();
  if (config.baseline_method == "frame_diff")
    return frame_diff(test, config.baseline_threshold);
  if (config.baseline_method == "mean_threshold")
    return mean_threshold(train, test, config.baseline_threshold);
  if (config.baseline_method == "temporal_median")
    return temporal_median(test, config.history, config.baseline_threshold);
  return eigen_background(train, test, config.eigen_count,
                          config.baseline_threshold);
}

} // namespace bsdb
