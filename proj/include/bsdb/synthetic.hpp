#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bsdb/datacube.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/mask.hpp"

namespace bsdb {

enum class SyntheticKind { static_bg, flicker_bg, moving_square, combined };

inline SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "static_bg") return SyntheticKind::static_bg;
  if (name == "flicker_bg") return SyntheticKind::flicker_bg;
  if (name == "moving_square") return SyntheticKind::moving_square;
  if (name == "combined") return SyntheticKind::combined;
  throw ParameterError("unknown synthetic kind \"" + name + "\"");
}

struct SyntheticParams {
  int rows = 64;
  int cols = 64;
  int frames = 30;
  int channels = 1;

  /// Diagonal gradient endpoints of the static background.
  double bg_low = 10.0;
  double bg_high = 245.0;
  /// Per-channel gains applied to the background (RGB cubes only).
  std::array<double, 3> channel_gain{1.0, 0.92, 0.85};

  /// Uniform noise amplitude, added per pixel and frame.
  double noise_amplitude = 0.0;

  /// Sinusoidal background flicker, in phase everywhere. Pixel (r, c)
  /// oscillates with amplitude
  /// flicker_amplitude * (1 - flicker_gradient + flicker_gradient (r+c)/D);
  /// flicker_gradient = 0 flickers uniformly, 1 fades to nothing at the
  /// top-left corner. A patch (column range) can restrict the flicker to a
  /// region, like a video screen or foliage in an otherwise still scene;
  /// flicker_patch_cols = 0 means the whole frame flickers.
  double flicker_amplitude = 30.0;
  double flicker_period = 16.0;
  double flicker_gradient = 0.8;
  int flicker_patch_col0 = 0;
  int flicker_patch_cols = 0;

  /// Moving square foreground. With wrap_motion the footprint is taken
  /// modulo the frame dimensions (the square re-enters on the other side);
  /// otherwise it is clipped at the borders.
  int square_size = 8;
  int square_row0 = 8;
  int square_col0 = 8;
  int square_drow = 1;
  int square_dcol = 1;
  bool wrap_motion = false;
  double square_value = 255.0;
  std::array<double, 3> square_color{250.0, 80.0, 60.0};
};

struct SyntheticSequence {
  Datacube cube;
  std::vector<BinaryMask> truth;
};

namespace detail {

/// Implementation-independent uniform in [0, 1): the standard library's
/// distributions are not bit-stable across toolchains, the raw engine is.
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Deterministic test footage. All kinds draw from the generator in the
/// same order, so zeroing an amplitude reproduces the simpler kind exactly.
/// Pixel values are rounded to integers in [0, 255], which makes 8-bit
/// image round-trips lossless. Ground-truth masks mark the square footprint
/// (empty for kinds without a foreground object).
inline SyntheticSequence gen_synthetic(SyntheticKind kind,
                                       const SyntheticParams& params,
                                       std::uint64_t seed) {
  if (params.rows < 1 || params.cols < 1 || params.frames < 1)
    throw ParameterError("synthetic sequence dimensions must be positive");
  if (params.channels != 1 && params.channels != 3)
    throw ParameterError("synthetic channels must be 1 or 3");
  if (params.square_size < 0)
    throw ParameterError("square size must be >= 0");
  if (!(params.flicker_period > 0.0))
    throw ParameterError("flicker period must be positive");
  if (params.flicker_gradient < 0.0 || params.flicker_gradient > 1.0)
    throw ParameterError("flicker gradient must be in [0, 1]");

  const bool with_flicker =
      kind == SyntheticKind::flicker_bg || kind == SyntheticKind::combined;
  const bool with_square =
      kind == SyntheticKind::moving_square || kind == SyntheticKind::combined;

  std::mt19937_64 gen(seed);

  const double denom =
      params.rows + params.cols > 2
          ? static_cast<double>(params.rows + params.cols - 2)
          : 1.0;

  SyntheticSequence seq;
  seq.cube = Datacube(params.rows, params.cols, params.channels,
                      params.frames);
  seq.truth.reserve(params.frames);

  const auto wrap = [](int x, int extent) {
    const int m = x % extent;
    return m < 0 ? m + extent : m;
  };

  for (int t = 0; t < params.frames; ++t) {
    BinaryMask truth(params.rows, params.cols);
    if (with_square && params.square_size > 0) {
      const int sq_r0 = params.square_row0 + t * params.square_drow;
      const int sq_c0 = params.square_col0 + t * params.square_dcol;
      for (int i = 0; i < params.square_size; ++i) {
        for (int j = 0; j < params.square_size; ++j) {
          int r = sq_r0 + i;
          int c = sq_c0 + j;
          if (params.wrap_motion) {
            r = wrap(r, params.rows);
            c = wrap(c, params.cols);
          } else if (r < 0 || r >= params.rows || c < 0 || c >= params.cols) {
            continue;
          }
          truth.at(r, c) = 1;
        }
      }
    }

    const double swell =
        std::sin(2.0 * std::numbers::pi * t / params.flicker_period);
    for (int r = 0; r < params.rows; ++r) {
      for (int c = 0; c < params.cols; ++c) {
        const double base =
            params.bg_low +
            (params.bg_high - params.bg_low) * (r + c) / denom;
        const bool in_patch =
            params.flicker_patch_cols <= 0 ||
            (c >= params.flicker_patch_col0 &&
             c < params.flicker_patch_col0 + params.flicker_patch_cols);
        const double flicker =
            in_patch ? params.flicker_amplitude *
                           (1.0 - params.flicker_gradient +
                            params.flicker_gradient * (r + c) / denom) *
                           swell
                     : 0.0;
        const bool in_square = truth.at(r, c) != 0;

        for (int ch = 0; ch < params.channels; ++ch) {
          const double noise =
              params.noise_amplitude * (2.0 * detail::unit_uniform(gen) - 1.0);
          double v;
          if (in_square) {
            v = params.channels == 1 ? params.square_value
                                     : params.square_color[ch];
          } else {
            const double gain =
                params.channels == 1 ? 1.0 : params.channel_gain[ch];
            v = base * gain + (with_flicker ? flicker : 0.0);
          }
          v += noise;
          v = std::min(255.0, std::max(0.0, v));
          seq.cube.plane(t, ch)(r, c) = static_cast<double>(std::lround(v));
        }
      }
    }
    seq.truth.push_back(std::move(truth));
  }
  return seq;
}

/// The two desk-scale benchmark sequences used by the evaluation harness.
struct BenchmarkData {
  Datacube bgd;
  Datacube rtd;
  std::vector<BinaryMask> truth;
};

/// Static scene: gradient background, bright 8x8 square sweeping across the
/// frame in the classification sequence. The square moves 3 px/frame and
/// wraps, so it never lingers anywhere for a whole 5-frame window (a pixel
/// the square covers for an entire window is indistinguishable from
/// background to a subtraction method). Grayscale, 64x64, BGD 20 / RTD 30.
inline BenchmarkData make_static_benchmark(std::uint64_t seed) {
  SyntheticParams params;
  params.rows = 64;
  params.cols = 64;
  params.channels = 1;
  params.noise_amplitude = 2.0;

  params.frames = 20;
  SyntheticSequence bgd = gen_synthetic(SyntheticKind::static_bg, params, seed);

  params.frames = 30;
  params.square_row0 = 8;
  params.square_col0 = 0;
  params.square_drow = 0;
  params.square_dcol = 3;
  params.wrap_motion = true;
  SyntheticSequence rtd =
      gen_synthetic(SyntheticKind::moving_square, params, seed + 1);
  return BenchmarkData{std::move(bgd.cube), std::move(rtd.cube),
                       std::move(rtd.truth)};
}

/// Dynamic scene: a strongly flickering patch (a video screen at the right
/// edge of an otherwise still scene) plus a colored square crossing the
/// still part. RGB, 64x64, BGD 40 / RTD 30. The flicker period divides
/// both lengths (zero temporal mean) and the background spans the full
/// [0, 255] range, so the trained model cancels the static part exactly
/// and concentrates on the flickering patch.
inline BenchmarkData make_flicker_benchmark(std::uint64_t seed) {
  SyntheticParams params;
  params.rows = 64;
  params.cols = 64;
  params.channels = 3;
  params.noise_amplitude = 2.0;
  params.bg_low = 0.0;
  params.bg_high = 255.0;
  params.channel_gain = {1.0, 1.0, 1.0};
  params.flicker_amplitude = 36.0;
  params.flicker_period = 10.0;
  params.flicker_gradient = 0.0;
  params.flicker_patch_col0 = 20;
  params.flicker_patch_cols = 20;

  params.frames = 40;
  SyntheticSequence bgd =
      gen_synthetic(SyntheticKind::flicker_bg, params, seed);

  params.frames = 30;
  params.square_row0 = 8;
  params.square_col0 = 4;
  params.square_drow = 1;
  params.square_dcol = 0;
  params.square_color = {255.0, 240.0, 255.0};
  SyntheticSequence rtd =
      gen_synthetic(SyntheticKind::combined, params, seed + 1);
  return BenchmarkData{std::move(bgd.cube), std::move(rtd.cube),
                       std::move(rtd.truth)};
}

/// Flat scene for the block-decomposition equivalence checks: constant
/// background, no noise, one bright square crossing all four quadrants.
/// On this footage the per-block renormalization is exact, so blocked and
/// unblocked runs must agree pixel for pixel outside the overlap bands.
inline BenchmarkData make_flat_block_benchmark(std::uint64_t seed) {
  SyntheticParams params;
  params.rows = 64;
  params.cols = 64;
  params.channels = 1;
  params.frames = 30;
  params.noise_amplitude = 0.0;
  params.bg_low = 120.0;
  params.bg_high = 120.0;
  params.square_row0 = 2;
  params.square_col0 = 2;
  params.square_drow = 1;
  params.square_dcol = 1;
  SyntheticSequence rtd =
      gen_synthetic(SyntheticKind::moving_square, params, seed);
  Datacube bgd;
  return BenchmarkData{std::move(bgd), std::move(rtd.cube),
                       std::move(rtd.truth)};
}

} // namespace bsdb
