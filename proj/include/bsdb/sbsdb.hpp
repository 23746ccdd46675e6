#pragma once

#include <string>
#include <vector>

#include "bsdb/config.hpp"
#include "bsdb/datacube.hpp"
#include "bsdb/histogram.hpp"
#include "bsdb/sliding_window.hpp"
#include "bsdb/spectral.hpp"

namespace bsdb {

/// One background per input frame. For n inputs and window m, frames
/// n-m+1 ... n-1 (0-based) reuse the background of frame n-m, since no
/// later window starts there.
struct BackgroundSequence {
  std::vector<BackgroundFrame> backgrounds;
};

struct SbsdbResult {
  BackgroundSequence backgrounds;
  std::vector<BinaryMask> masks;
};

namespace detail {

struct SbsdbCore {
  BackgroundSequence backgrounds;
  Datacube residuals;
};

/// Shared body of run_sbsdb and run_sbsdb_no_threshold: per-window
/// background capture plus clamped subtraction.
inline SbsdbCore sbsdb_core(const Datacube& cube,
                            const PipelineConfig& config) {
  config.validate();
  if (cube.channels != 1)
    throw ParameterError("sbsdb expects a grayscale cube, got " +
                         std::to_string(cube.channels) + " channel(s)");
  const int n = cube.frame_count();
  const int m = config.m;
  if (n < m)
    throw ParameterError("sbsdb needs at least m frames: n=" +
                         std::to_string(n) + " < m=" + std::to_string(m));

  std::vector<Mat> first(cube.planes.begin(), cube.planes.begin() + m);
  // The scale is frozen at the first window for the whole stream; the
  // incremental kernel update is only valid at a fixed epsilon.
  const double epsilon =
      config.epsilon ? *config.epsilon
                     : median_epsilon(std::span<const Mat>(first.data(),
                                                           first.size()));
  SlidingWindow window(std::move(first), epsilon);

  SbsdbCore out;
  out.backgrounds.backgrounds.resize(n);
  for (int t = 0; t <= n - m; ++t) {
    const MarkovMatrix markov = to_markov(window.kernel());
    const SpectralBasis basis = spectral_decompose(markov);
    const Projection proj = project(window.frames(), basis, config.eta);

    BackgroundFrame bg;
    bg.raw = Mat(cube.rows, cube.cols);
    for (std::size_t i = 0; i < bg.raw.size(); ++i)
      bg.raw.data()[i] = proj.coords(static_cast<int>(i), 0);
    bg.normalized = normalize_0_255(bg.raw);
    out.backgrounds.backgrounds[t] = std::move(bg);

    if (t < n - m) window.slide(cube.plane(t + m));
  }
  for (int t = n - m + 1; t < n; ++t)
    out.backgrounds.backgrounds[t] = out.backgrounds.backgrounds[n - m];

  out.residuals = Datacube(cube.rows, cube.cols, 1, n);
  for (int t = 0; t < n; ++t)
    out.residuals.plane(t) = clamp_non_negative(
        subtract(cube.plane(t), out.backgrounds.backgrounds[t].normalized));
  return out;
}

} // namespace detail

/// Full online static-background pipeline: per-frame background, clamped
/// subtraction, histogram threshold, binary mask.
inline SbsdbResult run_sbsdb(const Datacube& cube,
                             const PipelineConfig& config) {
  detail::SbsdbCore core = detail::sbsdb_core(cube, config);
  SbsdbResult result;
  result.masks.reserve(core.residuals.frame_count());
  for (int t = 0; t < core.residuals.frame_count(); ++t) {
    const Mat& residual = core.residuals.plane(t);
    const int th = threshold_gray(build_histogram(residual), config.mu);
    result.masks.push_back(apply_gray_threshold(residual, th));
  }
  result.backgrounds = std::move(core.backgrounds);
  return result;
}

/// The same pipeline with the threshold step left out; returns the clamped
/// residual sequence consumed by the dynamic-background phases.
inline Datacube run_sbsdb_no_threshold(const Datacube& cube,
                                       const PipelineConfig& config) {
  return detail::sbsdb_core(cube, config).residuals;
}

} // namespace bsdb
