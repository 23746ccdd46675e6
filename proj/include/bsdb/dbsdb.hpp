#pragma once

#include <array>
#include <string>
#include <vector>

#include "bsdb/config.hpp"
#include "bsdb/datacube.hpp"
#include "bsdb/histogram.hpp"
#include "bsdb/mask.hpp"
#include "bsdb/sbsdb.hpp"
#include "bsdb/spectral.hpp"

namespace bsdb {

/// Trained dynamic-background model: one accumulated background for the
/// grayscale phase and one per RGB channel.
struct DynamicBackground {
  BackgroundFrame gray;
  std::array<BackgroundFrame, 3> rgb;
};

/// Per-iteration diagnostics of the training loop.
struct TrainingTrace {
  int iterations = 0;
  /// Fraction of non-positive pixels in the residual cube after each
  /// iteration's subtraction.
  std::vector<double> nonpositive_fraction;
  /// Raw background captured at each iteration (the accumulator summands).
  std::vector<Mat> iteration_backgrounds;
};

namespace detail {

/// Iterative capture: extract the background of the residual cube (one
/// window spanning all frames), subtract its normalization from every
/// frame, add the raw background into the accumulator, repeat until the
/// non-positive fraction reaches rho or max_iterations is hit.
/// clamp_negatives is the grayscale rule; RGB channels keep negative
/// residuals so the two-sided histogram sees both tails.
inline BackgroundFrame train_plane(const Datacube& bgd,
                                   const PipelineConfig& config,
                                   bool clamp_negatives,
                                   TrainingTrace* trace) {
  config.validate();
  if (bgd.channels != 1)
    throw ParameterError("training plane must be grayscale");
  const int n = bgd.frame_count();
  if (n < 2)
    throw ParameterError("training needs at least 2 frames, got " +
                         std::to_string(n));

  Datacube residual = bgd;
  Mat accumulated(bgd.rows, bgd.cols);
  const double total =
      static_cast<double>(n) * static_cast<double>(residual.plane(0).size());

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    std::span<const Mat> frames(residual.planes.data(),
                                residual.planes.size());
    const double eps =
        config.epsilon ? *config.epsilon : median_epsilon(frames);
    const BackgroundFrame bg = extract_background(frames, eps, config.eta);

    for (int t = 0; t < n; ++t) {
      Mat diff = subtract(residual.plane(t), bg.normalized);
      residual.plane(t) = clamp_negatives ? clamp_non_negative(std::move(diff))
                                          : std::move(diff);
    }
    add_in_place(accumulated, bg.raw);

    std::size_t nonpositive = 0;
    for (int t = 0; t < n; ++t)
      for (double x : residual.plane(t).data())
        if (x <= 0.0) ++nonpositive;
    const double fraction = static_cast<double>(nonpositive) / total;

    if (trace) {
      trace->iterations = iteration;
      trace->nonpositive_fraction.push_back(fraction);
      trace->iteration_backgrounds.push_back(bg.raw);
    }
    if (fraction >= config.rho) break;
  }
  return BackgroundFrame{accumulated, normalize_0_255(accumulated)};
}

} // namespace detail

/// Grayscale training: returns the raw accumulator and its normalization.
inline BackgroundFrame train_dynamic_background(const Datacube& bgd,
                                                const PipelineConfig& config,
                                                TrainingTrace* trace = nullptr) {
  return detail::train_plane(bgd, config, /*clamp_negatives=*/true, trace);
}

/// Per-channel training on an RGB cube; channel subtraction keeps
/// negative values.
inline std::array<BackgroundFrame, 3> train_rgb(const Datacube& bgd,
                                                const PipelineConfig& config,
                                                std::array<TrainingTrace, 3>*
                                                    traces = nullptr) {
  if (bgd.channels != 3)
    throw ParameterError("train_rgb expects a 3-channel cube, got " +
                         std::to_string(bgd.channels) + " channel(s)");
  std::array<BackgroundFrame, 3> out;
  for (int c = 0; c < 3; ++c)
    out[c] = detail::train_plane(channel_cube(bgd, c), config,
                                 /*clamp_negatives=*/false,
                                 traces ? &(*traces)[c] : nullptr);
  return out;
}

/// Full training: grayscale phase runs the no-threshold static pipeline on
/// the luma cube and trains on its residual sequence; the RGB phase trains
/// directly on each raw channel.
inline DynamicBackground train_dbsdb(const Datacube& bgd,
                                     const PipelineConfig& config) {
  if (bgd.channels != 3)
    throw ParameterError("dbsdb training expects a 3-channel cube");
  DynamicBackground model;
  const Datacube residuals =
      run_sbsdb_no_threshold(to_grayscale(bgd), config);
  model.gray = train_dynamic_background(residuals, config);
  model.rgb = train_rgb(bgd, config);
  return model;
}

/// Per-frame outputs of the classification phases plus their fusion.
struct DbsdbResult {
  std::vector<BinaryMask> gray_masks;
  std::vector<BinaryMask> rgb_masks;
  std::vector<BinaryMask> fused;
};

/// Classification: grayscale phase (static-pipeline residuals minus the
/// trained gray background, thresholded) seeds a DFS over the RGB phase
/// output (per-channel subtraction, normalization, two-sided threshold,
/// OR across channels).
inline DbsdbResult run_dbsdb(const Datacube& rtd,
                             const DynamicBackground& model,
                             const PipelineConfig& config) {
  config.validate();
  if (rtd.channels != 3)
    throw ParameterError("dbsdb classification expects a 3-channel cube");
  if (model.gray.normalized.rows() != rtd.rows ||
      model.gray.normalized.cols() != rtd.cols)
    throw ShapeError("model is " +
                     std::to_string(model.gray.normalized.rows()) + "x" +
                     std::to_string(model.gray.normalized.cols()) +
                     ", cube frames are " + std::to_string(rtd.rows) + "x" +
                     std::to_string(rtd.cols));
  const int n = rtd.frame_count();
  DbsdbResult result;
  result.gray_masks.reserve(n);
  result.rgb_masks.reserve(n);
  result.fused.reserve(n);

  Datacube gray_residuals = to_grayscale(rtd);
  for (int pass = 0; pass < config.passes; ++pass)
    gray_residuals = run_sbsdb_no_threshold(gray_residuals, config);

  for (int t = 0; t < n; ++t) {
    const Mat diff = clamp_non_negative(
        subtract(gray_residuals.plane(t), model.gray.normalized));
    const int th = threshold_gray(build_histogram(diff), config.mu);
    result.gray_masks.push_back(apply_gray_threshold(diff, th));
  }

  for (int t = 0; t < n; ++t) {
    BinaryMask rgb_mask;
    for (int c = 0; c < 3; ++c) {
      const Mat normalized = normalize_0_255(
          subtract(rtd.plane(t, c), model.rgb[c].normalized));
      const auto [th_left, th_right] =
          threshold_rgb_two_sided(build_histogram(normalized), config.mu);
      BinaryMask channel_mask =
          apply_two_sided_threshold(normalized, th_left, th_right);
      rgb_mask = c == 0 ? std::move(channel_mask)
                        : mask_or(rgb_mask, channel_mask);
    }
    result.rgb_masks.push_back(std::move(rgb_mask));
  }

  for (int t = 0; t < n; ++t)
    result.fused.push_back(dfs_fuse(result.gray_masks[t], result.rgb_masks[t]));
  return result;
}

} // namespace bsdb
