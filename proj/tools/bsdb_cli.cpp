// Command-line front end: sequence I/O, synthetic data, the two pipelines,
// baselines, and the comparison harness.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsdb/bsdb.hpp"
#include "bsdb/config_io.hpp"

namespace fs = std::filesystem;
using bsdb::BinaryMask;
using bsdb::Datacube;
using bsdb::Mat;

namespace {

constexpr const char* kMaskPattern = "mask_%06d.pgm";
constexpr const char* kBgPattern = "bg_%06d.pgm";

/// Config flags shared by the pipeline subcommands. A --config JSON file
/// provides the base values; explicitly passed flags override it.
struct ConfigFlags {
  CLI::App* sub = nullptr;
  std::string config_path;
  std::string epsilon = "auto";
  int eta = 1;
  int m = 5;
  double mu = 2.0;
  double rho = 0.9;
  int max_iterations = 10;
  int passes = 1;
  int grid_rows = 1;
  int grid_cols = 1;
  int overlap_px = 20;
  int workers = 1;
  bool force_global_epsilon = false;
  std::string baseline_method = "frame_diff";
  double baseline_threshold = 20.0;
  int history = 10;
  int eigen_count = 3;

  void add(CLI::App& app) {
    sub = &app;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--epsilon", epsilon, "kernel scale or 'auto'");
    app.add_option("--eta", eta, "projection coordinates kept");
    app.add_option("--m", m, "sliding window length");
    app.add_option("--mu", mu, "histogram slope threshold");
    app.add_option("--rho", rho, "training stop fraction");
    app.add_option("--max-iterations", max_iterations,
                   "training iteration cap");
    app.add_option("--passes", passes, "grayscale-phase passes (1 or 2)");
    app.add_option("--grid-rows", grid_rows, "block grid rows");
    app.add_option("--grid-cols", grid_cols, "block grid cols");
    app.add_option("--overlap-px", overlap_px, "block overlap in pixels");
    app.add_option("--workers", workers, "parallel block workers");
    app.add_flag("--force-global-epsilon", force_global_epsilon,
                 "hand every block one frame-wide scale");
    app.add_option("--method", baseline_method,
                   "baseline: frame_diff, mean_threshold, temporal_median, "
                   "eigen_background");
    app.add_option("--threshold", baseline_threshold, "baseline threshold");
    app.add_option("--history", history, "temporal median window");
    app.add_option("--eigen-count", eigen_count,
                   "eigen-background retained vectors");
  }

  bsdb::PipelineConfig resolve() const {
    bsdb::PipelineConfig config;
    if (!config_path.empty()) config = bsdb::load_config_raw(config_path);

    const auto passed = [&](const std::string& name) {
      return sub->count(name) > 0;
    };
    if (passed("--epsilon")) {
      if (epsilon == "auto") {
        config.epsilon.reset();
      } else {
        try {
          config.epsilon = std::stod(epsilon);
        } catch (const std::exception&) {
          throw bsdb::ParameterError("--epsilon expects a number or 'auto', got \"" +
                                     epsilon + "\"");
        }
      }
    }
    if (passed("--eta")) config.eta = eta;
    if (passed("--m")) config.m = m;
    if (passed("--mu")) config.mu = mu;
    if (passed("--rho")) config.rho = rho;
    if (passed("--max-iterations")) config.max_iterations = max_iterations;
    if (passed("--passes")) config.passes = passes;
    if (passed("--grid-rows")) config.grid_rows = grid_rows;
    if (passed("--grid-cols")) config.grid_cols = grid_cols;
    if (passed("--overlap-px")) config.overlap_px = overlap_px;
    if (passed("--workers")) config.workers = workers;
    if (passed("--force-global-epsilon"))
      config.force_global_epsilon = force_global_epsilon;
    if (passed("--method")) config.baseline_method = baseline_method;
    if (passed("--threshold")) config.baseline_threshold = baseline_threshold;
    if (passed("--history")) config.history = history;
    if (passed("--eigen-count")) config.eigen_count = eigen_count;
    config.validate();
    return config;
  }
};

struct InputFlags {
  std::string directory;
  std::string pattern = "frame_%06d.pgm";
  int channels = 1;
  std::string truth_pattern;

  void add(CLI::App& app, const char* dir_flag = "--input-dir") {
    app.add_option(dir_flag, directory, "frame sequence directory")
        ->required();
    app.add_option("--pattern", pattern, "frame filename pattern");
    app.add_option("--channels", channels, "1 (grayscale) or 3 (RGB)");
    app.add_option("--truth-pattern", truth_pattern,
                   "ground-truth mask pattern (enables the metrics report)");
  }

  bsdb::SequenceManifest manifest() const {
    return bsdb::SequenceManifest{directory, pattern, channels, truth_pattern};
  }
};

Datacube load_gray(const InputFlags& input) {
  Datacube cube = bsdb::load_sequence(input.manifest());
  if (cube.channels == 3) cube = bsdb::to_grayscale(cube);
  return cube;
}

void report_if_truth(const InputFlags& input,
                     const std::vector<BinaryMask>& masks,
                     const std::string& out_path) {
  if (input.truth_pattern.empty()) return;
  const auto truth = bsdb::load_truth_masks(input.manifest());
  const auto report = bsdb::evaluate_masks(masks, truth);
  bsdb::write_report(out_path, report);
  std::printf("mean_iou=%.6f mean_precision=%.6f mean_recall=%.6f\n",
              report.mean.iou, report.mean.precision, report.mean.recall);
}

/// Resolve the blocked/unblocked execution of a grayscale mask pipeline.
std::vector<BinaryMask> run_gray_pipeline(
    const Datacube& cube, const bsdb::PipelineConfig& config,
    const std::function<std::vector<BinaryMask>(
        const Datacube&, const bsdb::PipelineConfig&)>& pipeline) {
  if (config.grid_rows == 1 && config.grid_cols == 1)
    return pipeline(cube, config);

  bsdb::PipelineConfig block_config = config;
  if (config.force_global_epsilon && !config.epsilon) {
    const int m = std::min(config.m, cube.frame_count());
    std::vector<Mat> first(cube.planes.begin(), cube.planes.begin() + m);
    block_config.epsilon =
        bsdb::median_epsilon(std::span<const Mat>(first.data(), first.size()));
  }
  const auto layout = bsdb::make_layout(cube.rows, cube.cols, config.grid_rows,
                                        config.grid_cols, config.overlap_px);
  return bsdb::run_blocked(
      cube, layout,
      [&](const Datacube& sub) { return pipeline(sub, block_config); },
      config.workers);
}

// ------------------------------------------------------------ subcommands

int cmd_gen_synthetic(const std::string& kind, const std::string& out_dir,
                      const bsdb::SyntheticParams& params,
                      std::uint64_t seed) {
  const auto seq =
      bsdb::gen_synthetic(bsdb::parse_synthetic_kind(kind), params, seed);
  const std::string pattern =
      params.channels == 1 ? "frame_%06d.pgm" : "frame_%06d.ppm";
  bsdb::save_sequence(out_dir, pattern, seq.cube);
  bsdb::save_masks(out_dir, "truth_%06d.pgm", seq.truth);
  std::printf("wrote %d frames (%s) and truth masks to %s\n",
              seq.cube.frame_count(), pattern.c_str(), out_dir.c_str());
  return 0;
}

int cmd_extract_bg(const InputFlags& input, const ConfigFlags& flags,
                   const std::string& out_path) {
  const bsdb::PipelineConfig config = flags.resolve();
  const Datacube cube = load_gray(input);
  const auto bg = bsdb::extract_background(cube, config);
  bsdb::write_pgm(out_path, bg.normalized);
  std::printf("wrote background %s from %d frames\n", out_path.c_str(),
              cube.frame_count());
  return 0;
}

int cmd_sbsdb(const InputFlags& input, const ConfigFlags& flags,
              const std::string& out_dir) {
  const bsdb::PipelineConfig config = flags.resolve();
  const Datacube cube = load_gray(input);
  fs::create_directories(out_dir);

  std::vector<BinaryMask> masks;
  if (config.grid_rows == 1 && config.grid_cols == 1) {
    auto result = bsdb::run_sbsdb(cube, config);
    masks = std::move(result.masks);
    for (int t = 0; t < cube.frame_count(); ++t)
      bsdb::write_pgm(
          (fs::path(out_dir) / bsdb::frame_filename(kBgPattern, t)).string(),
          result.backgrounds.backgrounds[t].normalized);
  } else {
    masks = run_gray_pipeline(cube, config,
                              [](const Datacube& sub,
                                 const bsdb::PipelineConfig& cfg) {
                                return bsdb::run_sbsdb(sub, cfg).masks;
                              });
  }
  bsdb::save_masks(out_dir, kMaskPattern, masks);
  report_if_truth(input, masks, (fs::path(out_dir) / "metrics.txt").string());
  std::printf("wrote %zu masks to %s\n", masks.size(), out_dir.c_str());
  return 0;
}

int cmd_dbsdb_train(const InputFlags& input, const ConfigFlags& flags,
                    const std::string& out_path) {
  const bsdb::PipelineConfig config = flags.resolve();
  const Datacube bgd = bsdb::load_sequence(input.manifest());
  if (bgd.channels != 3)
    throw bsdb::ParameterError("dbsdb-train expects RGB input (channels=3)");
  const auto model = bsdb::train_dbsdb(bgd, config);
  bsdb::save_model(out_path, model);
  std::printf("trained on %d frames, wrote model %s\n", bgd.frame_count(),
              out_path.c_str());
  return 0;
}

int cmd_dbsdb_run(const InputFlags& input, const ConfigFlags& flags,
                  const std::string& model_path, const std::string& out_dir) {
  const bsdb::PipelineConfig config = flags.resolve();
  const Datacube rtd = bsdb::load_sequence(input.manifest());
  if (rtd.channels != 3)
    throw bsdb::ParameterError("dbsdb-run expects RGB input (channels=3)");
  const bsdb::DynamicBackground model = bsdb::load_model(model_path);

  std::vector<BinaryMask> masks;
  if (config.grid_rows == 1 && config.grid_cols == 1) {
    masks = bsdb::run_dbsdb(rtd, model, config).fused;
  } else {
    const auto layout = bsdb::make_layout(rtd.rows, rtd.cols, config.grid_rows,
                                          config.grid_cols, config.overlap_px);
    // Each block classifies against the matching crop of the model.
    std::vector<bsdb::DynamicBackground> block_models;
    for (const auto& rect : layout.blocks) {
      bsdb::DynamicBackground cropped;
      cropped.gray.normalized = bsdb::crop(model.gray.normalized, rect);
      cropped.gray.raw = cropped.gray.normalized;
      for (int c = 0; c < 3; ++c) {
        cropped.rgb[c].normalized = bsdb::crop(model.rgb[c].normalized, rect);
        cropped.rgb[c].raw = cropped.rgb[c].normalized;
      }
      block_models.push_back(std::move(cropped));
    }
    masks = bsdb::run_blocked(
        rtd, layout,
        bsdb::BlockPipeline([&](const Datacube& sub, int block) {
          return bsdb::run_dbsdb(sub, block_models[block], config).fused;
        }),
        config.workers);
  }
  fs::create_directories(out_dir);
  bsdb::save_masks(out_dir, kMaskPattern, masks);
  report_if_truth(input, masks, (fs::path(out_dir) / "metrics.txt").string());
  std::printf("wrote %zu masks to %s\n", masks.size(), out_dir.c_str());
  return 0;
}

int cmd_baseline(const InputFlags& input, const InputFlags& train_input,
                 bool has_train, const ConfigFlags& flags,
                 const std::string& out_dir, bool speckle) {
  const bsdb::PipelineConfig config = flags.resolve();
  const Datacube test = load_gray(input);
  Datacube train;
  if (config.baseline_method == "mean_threshold" ||
      config.baseline_method == "eigen_background") {
    if (!has_train)
      throw bsdb::ParameterError("--method " + config.baseline_method +
                                 " needs --train-dir");
    train = load_gray(train_input);
  }
  std::vector<BinaryMask> masks = bsdb::run_baseline(train, test, config);
  if (speckle)
    for (auto& mask : masks) mask = bsdb::speckle_removal(mask);

  fs::create_directories(out_dir);
  bsdb::save_masks(out_dir, kMaskPattern, masks);
  report_if_truth(input, masks, (fs::path(out_dir) / "metrics.txt").string());
  std::printf("wrote %zu %s masks to %s\n", masks.size(),
              config.baseline_method.c_str(), out_dir.c_str());
  return 0;
}

struct EvalRow {
  std::string benchmark;
  std::string method;
  bsdb::MaskMetrics mean;
};

void eval_one(const std::string& benchmark, const std::string& method,
              const std::vector<BinaryMask>& masks,
              const std::vector<BinaryMask>& truth, const std::string& out_dir,
              std::vector<EvalRow>& rows) {
  const fs::path dir = fs::path(out_dir) / benchmark / method;
  bsdb::save_masks(dir.string(), kMaskPattern, masks);
  const auto report = bsdb::evaluate_masks(masks, truth);
  bsdb::write_report((dir / "metrics.txt").string(), report);
  rows.push_back({benchmark, method, report.mean});
}

int cmd_eval(const ConfigFlags& flags, const std::string& out_dir,
             std::uint64_t seed) {
  const bsdb::PipelineConfig config = flags.resolve();
  std::vector<EvalRow> rows;

  // Static-background benchmark: BSDB needs no training; trained baselines
  // fit on the foreground-free BGD.
  {
    const auto bench = bsdb::make_static_benchmark(seed);
    eval_one("static", "bsdb", bsdb::run_sbsdb(bench.rtd, config).masks,
             bench.truth, out_dir, rows);

    auto post = [&](std::vector<BinaryMask> masks) {
      for (auto& m : masks) m = bsdb::speckle_removal(m);
      return masks;
    };
    eval_one("static", "frame_diff",
             post(bsdb::frame_diff(bench.rtd, config.baseline_threshold)),
             bench.truth, out_dir, rows);
    eval_one("static", "mean_threshold",
             post(bsdb::mean_threshold(bench.bgd, bench.rtd,
                                       config.baseline_threshold)),
             bench.truth, out_dir, rows);
    eval_one("static", "temporal_median",
             post(bsdb::temporal_median(bench.rtd, config.history,
                                        config.baseline_threshold)),
             bench.truth, out_dir, rows);
    eval_one("static", "eigen_background",
             post(bsdb::eigen_background(bench.bgd, bench.rtd,
                                         config.eigen_count,
                                         config.baseline_threshold)),
             bench.truth, out_dir, rows);
  }

  // Flicker benchmark: BSDB trains its dynamic background on the BGD;
  // baselines run on the grayscale conversion.
  {
    const auto bench = bsdb::make_flicker_benchmark(seed + 1000);
    const auto model = bsdb::train_dbsdb(bench.bgd, config);
    eval_one("flicker", "bsdb",
             bsdb::run_dbsdb(bench.rtd, model, config).fused, bench.truth,
             out_dir, rows);

    const Datacube gray_bgd = bsdb::to_grayscale(bench.bgd);
    const Datacube gray_rtd = bsdb::to_grayscale(bench.rtd);
    auto post = [&](std::vector<BinaryMask> masks) {
      for (auto& m : masks) m = bsdb::speckle_removal(m);
      return masks;
    };
    eval_one("flicker", "frame_diff",
             post(bsdb::frame_diff(gray_rtd, config.baseline_threshold)),
             bench.truth, out_dir, rows);
    eval_one("flicker", "mean_threshold",
             post(bsdb::mean_threshold(gray_bgd, gray_rtd,
                                       config.baseline_threshold)),
             bench.truth, out_dir, rows);
    eval_one("flicker", "temporal_median",
             post(bsdb::temporal_median(gray_rtd, config.history,
                                        config.baseline_threshold)),
             bench.truth, out_dir, rows);
    eval_one("flicker", "eigen_background",
             post(bsdb::eigen_background(gray_bgd, gray_rtd,
                                         config.eigen_count,
                                         config.baseline_threshold)),
             bench.truth, out_dir, rows);
  }

  std::string table;
  char line[200];
  for (const EvalRow& row : rows) {
    std::snprintf(line, sizeof(line),
                  "benchmark=%s method=%s mean_iou=%.6f mean_precision=%.6f "
                  "mean_recall=%.6f\n",
                  row.benchmark.c_str(), row.method.c_str(), row.mean.iou,
                  row.mean.precision, row.mean.recall);
    table += line;
  }
  std::ofstream out(fs::path(out_dir) / "eval_metrics.txt");
  if (!out) throw bsdb::IoError("cannot write eval metrics table");
  out << table;
  std::fputs(table.c_str(), stdout);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Background subtraction toolkit built on diffusion-bases "
               "spectral dimensionality reduction"};
  app.require_subcommand(1);

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic",
                                 "generate a deterministic test sequence");
  std::string gen_kind = "combined", gen_out;
  std::uint64_t gen_seed = 0;
  bsdb::SyntheticParams gen_params;
  gen->add_option("--kind", gen_kind,
                  "static_bg, flicker_bg, moving_square, combined");
  gen->add_option("--out-dir", gen_out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--rows", gen_params.rows, "frame height");
  gen->add_option("--cols", gen_params.cols, "frame width");
  gen->add_option("--frames", gen_params.frames, "frame count");
  gen->add_option("--channels", gen_params.channels, "1 or 3");
  gen->add_option("--noise-amplitude", gen_params.noise_amplitude,
                  "uniform noise amplitude");
  gen->add_option("--bg-low", gen_params.bg_low, "gradient low end");
  gen->add_option("--bg-high", gen_params.bg_high, "gradient high end");
  gen->add_option("--flicker-amplitude", gen_params.flicker_amplitude,
                  "sinusoidal flicker amplitude");
  gen->add_option("--flicker-period", gen_params.flicker_period,
                  "flicker period in frames");
  gen->add_option("--flicker-gradient", gen_params.flicker_gradient,
                  "spatial falloff of the flicker amplitude (0..1)");
  gen->add_option("--flicker-patch-col0", gen_params.flicker_patch_col0,
                  "first column of the flickering patch");
  gen->add_option("--flicker-patch-cols", gen_params.flicker_patch_cols,
                  "patch width in columns (0 = whole frame)");
  gen->add_option("--square-size", gen_params.square_size, "square edge");
  gen->add_option("--square-row0", gen_params.square_row0, "start row");
  gen->add_option("--square-col0", gen_params.square_col0, "start col");
  gen->add_option("--square-drow", gen_params.square_drow, "rows per frame");
  gen->add_option("--square-dcol", gen_params.square_dcol, "cols per frame");
  gen->add_flag("--wrap-motion", gen_params.wrap_motion,
                "square re-enters on the opposite side instead of clipping");
  gen->add_option("--square-value", gen_params.square_value,
                  "grayscale square intensity");
  std::vector<double> gen_color;
  gen->add_option("--square-color", gen_color,
                  "square RGB values (three numbers)")
      ->expected(3);

  // extract-bg
  auto* extract = app.add_subcommand("extract-bg",
                                     "single-shot background capture");
  InputFlags extract_input;
  ConfigFlags extract_flags;
  std::string extract_out = "background.pgm";
  extract_input.add(*extract);
  extract_flags.add(*extract);
  extract->add_option("--out", extract_out, "output PGM path");

  // sbsdb
  auto* sbsdb_cmd =
      app.add_subcommand("sbsdb", "static-background subtraction (online)");
  InputFlags sbsdb_input;
  ConfigFlags sbsdb_flags;
  std::string sbsdb_out = "sbsdb_out";
  sbsdb_input.add(*sbsdb_cmd);
  sbsdb_flags.add(*sbsdb_cmd);
  sbsdb_cmd->add_option("--out-dir", sbsdb_out, "output directory");

  // dbsdb-train
  auto* train_cmd = app.add_subcommand(
      "dbsdb-train", "train the dynamic background model (RGB BGD)");
  InputFlags train_input;
  ConfigFlags train_flags;
  std::string train_out = "model.dbg";
  train_input.add(*train_cmd, "--bgd-dir");
  train_flags.add(*train_cmd);
  train_cmd->add_option("--out", train_out, "model file path");

  // dbsdb-run
  auto* run_cmd = app.add_subcommand(
      "dbsdb-run", "classify an RGB sequence against a trained model");
  InputFlags run_input;
  ConfigFlags run_flags;
  std::string run_model = "model.dbg", run_out = "dbsdb_out";
  run_input.add(*run_cmd, "--rtd-dir");
  run_flags.add(*run_cmd);
  run_cmd->add_option("--model", run_model, "model file path");
  run_cmd->add_option("--out-dir", run_out, "output directory");

  // baseline
  auto* base_cmd = app.add_subcommand("baseline",
                                      "run a comparison algorithm");
  InputFlags base_input, base_train;
  ConfigFlags base_flags;
  std::string base_out = "baseline_out";
  bool base_speckle = false;
  base_input.add(*base_cmd);
  base_flags.add(*base_cmd);
  base_cmd->add_option("--train-dir", base_train.directory,
                       "training sequence directory");
  base_cmd->add_option("--train-pattern", base_train.pattern,
                       "training frame pattern");
  base_cmd->add_option("--train-channels", base_train.channels,
                       "training channels");
  base_cmd->add_option("--out-dir", base_out, "output directory");
  base_cmd->add_flag("--speckle", base_speckle,
                     "apply speckle removal to the masks");

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "benchmark the pipelines against every baseline");
  ConfigFlags eval_flags;
  std::string eval_out = "eval_out";
  std::uint64_t eval_seed = 0;
  eval_flags.add(*eval_cmd);
  eval_cmd->add_option("--out-dir", eval_out, "output directory");
  eval_cmd->add_option("--seed", eval_seed, "benchmark generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      if (gen_color.size() == 3)
        gen_params.square_color = {gen_color[0], gen_color[1], gen_color[2]};
      return cmd_gen_synthetic(gen_kind, gen_out, gen_params, gen_seed);
    }
    if (*extract) return cmd_extract_bg(extract_input, extract_flags, extract_out);
    if (*sbsdb_cmd) return cmd_sbsdb(sbsdb_input, sbsdb_flags, sbsdb_out);
    if (*train_cmd) return cmd_dbsdb_train(train_input, train_flags, train_out);
    if (*run_cmd)
      return cmd_dbsdb_run(run_input, run_flags, run_model, run_out);
    if (*base_cmd)
      return cmd_baseline(base_input, base_train,
                          base_cmd->count("--train-dir") > 0, base_flags,
                          base_out, base_speckle);
    if (*eval_cmd) return cmd_eval(eval_flags, eval_out, eval_seed);
  } catch (const bsdb::ParameterError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const bsdb::ShapeError& e) {
    std::fprintf(stderr, "shape error: %s\n", e.what());
    return 3;
  } catch (const bsdb::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const bsdb::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
