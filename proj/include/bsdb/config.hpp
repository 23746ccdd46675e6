#pragma once

#include <optional>
#include <string>

#include "bsdb/errors.hpp"

namespace bsdb {

/// Knobs shared by the pipelines and the CLI. Field names match the
/// command-line flags.
struct PipelineConfig {
  /// Kernel scale; unset means the median pairwise-distance heuristic,
  /// resolved once per pipeline instance.
  std::optional<double> epsilon;
  /// Number of projection coordinates kept. Background capture only reads
  /// the first one; larger values are for diagnostics.
  int eta = 1;
  /// Sliding-window length.
  int m = 5;
  /// Histogram slope-magnitude threshold.
  double mu = 2.0;
  /// Training stop: fraction of non-positive pixels in the residual cube.
  double rho = 0.9;
  int max_iterations = 10;
  /// Applications of the no-threshold pass in the grayscale
  /// classification phase (1 or 2).
  int passes = 1;

  // Block decomposition. 1x1 runs the plain sequential pipeline.
  int grid_rows = 1;
  int grid_cols = 1;
  int overlap_px = 20;
  int workers = 1;
  /// Debug switch: resolve one epsilon over the whole frame and hand it to
  /// every block instead of letting each block pick its own.
  bool force_global_epsilon = false;

  // Baseline methods.
  std::string baseline_method = "frame_diff";
  double baseline_threshold = 20.0;
  /// Trailing-window length for the temporal median.
  int history = 10;
  /// Retained eigenvectors for the eigen-background baseline.
  int eigen_count = 3;

  void validate() const {
    if (epsilon && !(*epsilon > 0.0))
      throw ParameterError("epsilon must be positive");
    if (eta < 1) throw ParameterError("eta must be >= 1");
    if (m < 2 || m > 60)
      throw ParameterError("window size m=" + std::to_string(m) +
                           " outside valid range [2, 60]");
    if (!(mu > 0.0)) throw ParameterError("mu must be positive");
    if (!(rho > 0.0) || rho > 1.0)
      throw ParameterError("rho must be in (0, 1]");
    if (max_iterations < 1)
      throw ParameterError("max_iterations must be >= 1");
    if (passes != 1 && passes != 2)
      throw ParameterError("passes must be 1 or 2");
    if (grid_rows < 1 || grid_cols < 1)
      throw ParameterError("block grid dimensions must be >= 1");
    if (overlap_px < 0) throw ParameterError("overlap_px must be >= 0");
    if (workers < 1) throw ParameterError("workers must be >= 1");
    if (baseline_threshold < 0.0)
      throw ParameterError("baseline threshold must be >= 0");
    if (history < 1) throw ParameterError("history must be >= 1");
    if (eigen_count < 1) throw ParameterError("eigen_count must be >= 1");
    if (baseline_method != "frame_diff" &&
        baseline_method != "mean_threshold" &&
        baseline_method != "temporal_median" &&
        baseline_method != "eigen_background")
      throw ParameterError("unknown baseline method \"" + baseline_method +
                           "\"");
  }
};

} // namespace bsdb
