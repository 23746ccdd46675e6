#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "bsdb/errors.hpp"
#include "bsdb/mat.hpp"

namespace bsdb {

/// Eigendecomposition of a real symmetric matrix. values[k] pairs with
/// column k of vectors; vectors have unit Euclidean norm. Sorted by
/// descending eigenvalue.
struct SymmetricEigen {
  std::vector<double> values;
  Mat vectors;
};

/// Cyclic Jacobi rotations. Dense and O(n^3) per sweep, which is the right
/// tool here: every matrix this library decomposes is a frame-graph kernel
/// or a training-set Gram matrix, n <= ~60.
inline SymmetricEigen jacobi_eigen_symmetric(Mat a, int max_sweeps = 64) {
  if (a.rows() != a.cols())
    throw ShapeError("eigensolver expects a square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  const int n = a.rows();

  Mat v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
  };

  double fro = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
  fro = std::sqrt(fro);
  const double tol = 1e-15 * std::max(fro, 1.0);

  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > max_sweeps)
      throw NumericError(
          "Jacobi eigensolver did not converge: n=" + std::to_string(n) +
          " off-diagonal norm=" + std::to_string(off_norm()) +
          " Frobenius norm=" + std::to_string(fro) + " after " +
          std::to_string(max_sweeps) + " sweeps");
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                             : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(p, i) = a(i, p);
          a(i, q) = s * aip + c * aiq;
          a(q, i) = a(i, q);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) > a(y, y); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

} // namespace bsdb
