#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bsdb/config.hpp"
#include "bsdb/datacube.hpp"
#include "bsdb/eigensolver.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/mat.hpp"

namespace bsdb {

/// Gaussian affinity between frame-vectors: w[i][j] = exp(-|Fi - Fj|^2 / eps).
/// Symmetric with unit diagonal by construction.
struct KernelMatrix {
  Mat w;
  double epsilon = 0.0;
};

/// Row-stochastic version of a kernel. degrees[i] is the row sum of the
/// source kernel, kept for the symmetric-conjugate eigendecomposition.
struct MarkovMatrix {
  Mat p;
  std::vector<double> degrees;
};

/// Eigenvalues of P in descending |lambda| order together with right (xi)
/// and left (psi) eigenvectors, one per column. Right vectors have unit
/// Euclidean norm; the largest-magnitude component of each is positive.
struct SpectralBasis {
  std::vector<double> eigenvalues;
  Mat right;
  Mat left;
};

/// Row i holds g_i, the projection of hyperpixel i onto the first eta
/// right eigenvectors.
struct Projection {
  Mat coords;
};

/// Raw first-coordinate image and its [0, 255] normalization.
struct BackgroundFrame {
  Mat raw;
  Mat normalized;
};

namespace detail {

inline void check_equal_frames(std::span<const Mat> frames) {
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (!frames[t].same_shape(frames[0]))
      throw ShapeError("frame " + std::to_string(t) + " is " +
                       std::to_string(frames[t].rows()) + "x" +
                       std::to_string(frames[t].cols()) + ", expected " +
                       std::to_string(frames[0].rows()) + "x" +
                       std::to_string(frames[0].cols()));
  }
}

inline double squared_distance(const Mat& a, const Mat& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s;
}

/// Single source of truth for kernel entries. The sliding-window update
/// reuses it so incremental and full builds agree bit for bit.
inline double kernel_entry(const Mat& a, const Mat& b, double epsilon) {
  return std::exp(-squared_distance(a, b) / epsilon);
}

} // namespace detail

/// Scale heuristic: lower median of the n(n-1)/2 pairwise squared distances
/// between frame-vectors, or 1 when all frames are identical.
inline double median_epsilon(std::span<const Mat> frames) {
  if (frames.size() < 2)
    throw ParameterError("median_epsilon needs at least 2 frames, got " +
                         std::to_string(frames.size()));
  detail::check_equal_frames(frames);
  std::vector<double> dists;
  dists.reserve(frames.size() * (frames.size() - 1) / 2);
  for (std::size_t i = 0; i < frames.size(); ++i)
    for (std::size_t j = i + 1; j < frames.size(); ++j)
      dists.push_back(detail::squared_distance(frames[i], frames[j]));
  const std::size_t mid = (dists.size() - 1) / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  const double med = dists[mid];
  return med > 0.0 ? med : 1.0;
}

inline KernelMatrix gaussian_kernel(std::span<const Mat> frames,
                                    double epsilon) {
  if (!(epsilon > 0.0))
    throw ParameterError("epsilon must be positive, got " +
                         std::to_string(epsilon));
  if (frames.size() < 2)
    throw ParameterError("gaussian_kernel needs at least 2 frames, got " +
                         std::to_string(frames.size()));
  detail::check_equal_frames(frames);
  const int n = static_cast<int>(frames.size());
  KernelMatrix kernel{Mat(n, n), epsilon};
  for (int i = 0; i < n; ++i) kernel.w(i, i) = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = detail::kernel_entry(frames[i], frames[j], epsilon);
      kernel.w(i, j) = w;
      kernel.w(j, i) = w;
    }
  }
  return kernel;
}

/// Divide each kernel row by its sum. The unit diagonal makes a zero row
/// sum impossible, so that case is an assertion, not a branch.
inline MarkovMatrix to_markov(const KernelMatrix& kernel) {
  const int n = kernel.w.rows();
  MarkovMatrix markov{Mat(n, n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) d += kernel.w(i, j);
    assert(d > 0.0);
    markov.degrees[i] = d;
    for (int j = 0; j < n; ++j) markov.p(i, j) = kernel.w(i, j) / d;
  }
  return markov;
}

/// Full spectral decomposition of P through its symmetric conjugate
/// A = D^{-1/2} W D^{-1/2}. If A v = lambda v then xi = D^{-1/2} v and
/// psi = D^{1/2} v are right/left eigenvectors of P for the same lambda.
/// xi is rescaled to unit norm and psi compensated, so psi_k . xi_k = 1.
inline SpectralBasis spectral_decompose(const MarkovMatrix& markov) {
  const int n = markov.p.rows();
  std::vector<double> sqrt_deg(n);
  for (int i = 0; i < n; ++i) sqrt_deg[i] = std::sqrt(markov.degrees[i]);

  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = markov.p(i, j) * sqrt_deg[i] / sqrt_deg[j];
      a(i, j) = v;
      a(j, i) = v;
    }
  }

  const SymmetricEigen eig = jacobi_eigen_symmetric(std::move(a));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    const double ax = std::fabs(eig.values[x]);
    const double ay = std::fabs(eig.values[y]);
    if (ax != ay) return ax > ay;
    return eig.values[x] > eig.values[y];
  });

  SpectralBasis basis;
  basis.eigenvalues.resize(n);
  basis.right = Mat(n, n);
  basis.left = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    basis.eigenvalues[k] = eig.values[src];

    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = eig.vectors(i, src) / sqrt_deg[i];
      basis.right(i, k) = xi;
      norm2 += xi * xi;
    }
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0))
      throw NumericError("degenerate eigenvector at index " +
                         std::to_string(k));

    int peak = 0;
    for (int i = 1; i < n; ++i)
      if (std::fabs(basis.right(i, k)) > std::fabs(basis.right(peak, k)))
        peak = i;
    const double sign = basis.right(peak, k) < 0.0 ? -1.0 : 1.0;

    for (int i = 0; i < n; ++i) {
      basis.right(i, k) *= sign / norm;
      basis.left(i, k) = sign * norm * eig.vectors(i, src) * sqrt_deg[i];
    }
  }
  return basis;
}

/// Project every hyperpixel (the per-pixel trajectory across the frames)
/// onto the first eta right eigenvectors: g_i[k] = x_i . xi_k.
inline Projection project(std::span<const Mat> frames,
                          const SpectralBasis& basis, int eta) {
  const int n = static_cast<int>(frames.size());
  if (eta < 1 || eta > n)
    throw ParameterError("eta=" + std::to_string(eta) +
                         " out of range [1, " + std::to_string(n) + "]");
  if (basis.right.rows() != n)
    throw ShapeError("basis size " + std::to_string(basis.right.rows()) +
                     " does not match frame count " + std::to_string(n));
  detail::check_equal_frames(frames);
  const std::size_t d = frames.empty() ? 0 : frames[0].size();

  Projection proj{Mat(static_cast<int>(d), eta)};
  for (int k = 0; k < eta; ++k) {
    for (int t = 0; t < n; ++t) {
      const double coeff = basis.right(t, k);
      const std::vector<double>& frame = frames[t].data();
      for (std::size_t i = 0; i < d; ++i)
        proj.coords(static_cast<int>(i), k) += frame[i] * coeff;
    }
  }
  return proj;
}

/// One-shot background capture: kernel, Markov normalization, spectral
/// decomposition, projection; the vector of first coordinates reshaped to
/// frame geometry is the background.
inline BackgroundFrame extract_background(std::span<const Mat> frames,
                                          double epsilon, int eta) {
  if (frames.size() < 2)
    throw ParameterError("extract_background needs at least 2 frames, got " +
                         std::to_string(frames.size()));
  const KernelMatrix kernel = gaussian_kernel(frames, epsilon);
  const MarkovMatrix markov = to_markov(kernel);
  const SpectralBasis basis = spectral_decompose(markov);
  const Projection proj = project(frames, basis, eta);

  BackgroundFrame bg;
  bg.raw = Mat(frames[0].rows(), frames[0].cols());
  for (std::size_t i = 0; i < bg.raw.size(); ++i)
    bg.raw.data()[i] = proj.coords(static_cast<int>(i), 0);
  bg.normalized = normalize_0_255(bg.raw);
  return bg;
}

/// Overload over a grayscale cube; unset config.epsilon resolves to the
/// median heuristic over the cube's frame-vectors.
inline BackgroundFrame extract_background(const Datacube& cube,
                                          const PipelineConfig& config) {
  if (cube.channels != 1)
    throw ParameterError("extract_background expects a grayscale cube");
  std::span<const Mat> frames(cube.planes.data(), cube.planes.size());
  const double eps = config.epsilon ? *config.epsilon : median_epsilon(frames);
  return extract_background(frames, eps, config.eta);
}

} // namespace bsdb
