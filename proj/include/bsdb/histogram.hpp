#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "bsdb/errors.hpp"
#include "bsdb/mask.hpp"
#include "bsdb/mat.hpp"

namespace bsdb {

/// 256-bin gray-level histogram plus its smoothed version. Smoothing is a
/// centered moving average of window 5 with symmetric boundary padding
/// (index -1 mirrors to 0, -2 to 1, ...), which conserves total mass.
struct Histogram {
  std::array<double, 256> bins{};
  std::array<double, 256> smoothed{};
};

namespace detail {

inline int reflect_index(int i) {
  if (i < 0) return -i - 1;
  if (i > 255) return 511 - i;
  return i;
}

inline void smooth_histogram(Histogram& hist) {
  for (int i = 0; i < 256; ++i) {
    double s = 0.0;
    for (int k = -2; k <= 2; ++k) s += hist.bins[reflect_index(i + k)];
    hist.smoothed[i] = s / 5.0;
  }
}

/// Maximum of the smoothed histogram. Ties happen in practice (a single
/// spike smooths into a 5-bin plateau), so each scan starts from its own
/// end of the plateau: the rightward scan from the last maximum and the
/// leftward scan from the first, which makes both scans step off the
/// plateau instead of stopping inside it.
inline int smoothed_argmax_last(const Histogram& hist) {
  int arg = 0;
  for (int i = 1; i < 256; ++i)
    if (hist.smoothed[i] >= hist.smoothed[arg]) arg = i;
  return arg;
}

inline int smoothed_argmax_first(const Histogram& hist) {
  int arg = 0;
  for (int i = 1; i < 256; ++i)
    if (hist.smoothed[i] > hist.smoothed[arg]) arg = i;
  return arg;
}

} // namespace detail

/// Bin a frame of values in [0, 255] (nearest-integer levels) and smooth.
inline Histogram build_histogram(const Mat& frame) {
  Histogram hist;
  for (double x : frame.data()) {
    if (!(x >= 0.0) || !(x <= 255.0))
      throw ParameterError("histogram input value " + std::to_string(x) +
                           " outside [0, 255]");
    hist.bins[static_cast<int>(std::lround(x))] += 1.0;
  }
  detail::smooth_histogram(hist);
  return hist;
}

/// Walk right from the smoothed maximum and stop at the first level where
/// the slope magnitude h(x+1) - h(x) drops below mu, once the walk has
/// actually entered a descent (some earlier step with magnitude >= mu);
/// 255 when it never stops. The descent requirement keeps a histogram
/// whose peak is locally flat (a clamp spike at bin 0, a smooth mode) from
/// stopping on its own apex, which would put every pixel of the frame at
/// or above the threshold.
inline int threshold_gray(const Histogram& hist, double mu) {
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  bool descended = false;
  for (int x = detail::smoothed_argmax_last(hist); x < 255; ++x) {
    if (std::fabs(hist.smoothed[x + 1] - hist.smoothed[x]) >= mu)
      descended = true;
    else if (descended)
      return x;
  }
  return 255;
}

/// Two-sided variant for subtracted RGB histograms, whose background mode
/// sits in the middle. Right scan as in threshold_gray; left scan walks
/// down from the first maximum using the backward difference h(y) - h(y-1),
/// under the same descent rule. Fallbacks are 255 and 0.
inline std::pair<int, int> threshold_rgb_two_sided(const Histogram& hist,
                                                   double mu) {
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  int th_right = 255;
  bool descended = false;
  for (int x = detail::smoothed_argmax_last(hist); x < 255; ++x) {
    if (std::fabs(hist.smoothed[x + 1] - hist.smoothed[x]) >= mu) {
      descended = true;
    } else if (descended) {
      th_right = x;
      break;
    }
  }
  int th_left = 0;
  descended = false;
  for (int y = detail::smoothed_argmax_first(hist); y > 0; --y) {
    if (std::fabs(hist.smoothed[y] - hist.smoothed[y - 1]) >= mu) {
      descended = true;
    } else if (descended) {
      th_left = y;
      break;
    }
  }
  return {th_left, th_right};
}

/// Foreground where the value reaches the threshold.
inline BinaryMask apply_gray_threshold(const Mat& frame, int th) {
  BinaryMask mask(frame.rows(), frame.cols());
  for (std::size_t i = 0; i < frame.size(); ++i)
    mask.bits[i] = frame.data()[i] >= static_cast<double>(th) ? 1 : 0;
  return mask;
}

/// Foreground outside the [th_left, th_right] band.
inline BinaryMask apply_two_sided_threshold(const Mat& frame, int th_left,
                                            int th_right) {
  BinaryMask mask(frame.rows(), frame.cols());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double v = frame.data()[i];
    mask.bits[i] =
        (v < static_cast<double>(th_left) || v > static_cast<double>(th_right))
            ? 1
            : 0;
  }
  return mask;
}

/// Per-channel two-sided thresholding, channels combined by pixel-wise OR.
inline BinaryMask apply_rgb_threshold(
    const std::array<Mat, 3>& channels,
    const std::array<std::pair<int, int>, 3>& thresholds) {
  BinaryMask mask = apply_two_sided_threshold(channels[0], thresholds[0].first,
                                              thresholds[0].second);
  for (int c = 1; c < 3; ++c)
    mask = mask_or(mask, apply_two_sided_threshold(channels[c],
                                                   thresholds[c].first,
                                                   thresholds[c].second));
  return mask;
}

} // namespace bsdb
