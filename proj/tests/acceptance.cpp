// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "bsdb/bsdb.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using bsdb::BinaryMask;
using bsdb::Datacube;
using bsdb::Mat;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// 1. Spectral correctness on random datacubes, including the dense-oracle
//    equivalence at n <= 8, within 10 s.
void criterion_spectral(Check& check) {
  const auto start = Clock::now();
  std::mt19937 rng(10001);
  std::uniform_int_distribution<int> n_dist(3, 50);
  std::uniform_int_distribution<int> dim_dist(2, 6);
  std::uniform_real_distribution<double> value(0.0, 255.0);

  for (int trial = 0; trial < 200 && check.ok; ++trial) {
    const int n = n_dist(rng);
    const int rows = dim_dist(rng), cols = dim_dist(rng);
    std::vector<std::vector<double>> raw(n, std::vector<double>(rows * cols));
    for (auto& f : raw)
      for (double& x : f) x = value(rng);
    std::vector<Mat> frames;
    for (const auto& f : raw) {
      Mat m(rows, cols);
      m.data() = f;
      frames.push_back(std::move(m));
    }
    std::span<const Mat> span(frames.data(), frames.size());
    const double eps = bsdb::median_epsilon(span);
    const auto kernel = bsdb::gaussian_kernel(span, eps);

    for (int i = 0; i < n; ++i) {
      check.expect(kernel.w(i, i) == 1.0, "kernel diagonal not 1");
      for (int j = 0; j < n; ++j)
        check.expect(kernel.w(i, j) == kernel.w(j, i), "kernel not symmetric");
    }

    const auto markov = bsdb::to_markov(kernel);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) sum += markov.p(i, j);
      check.expect(std::fabs(sum - 1.0) <= 1e-12,
                   "row sum off by " + std::to_string(sum - 1.0));
    }

    const auto basis = bsdb::spectral_decompose(markov);
    check.expect(std::fabs(basis.eigenvalues[0] - 1.0) <= 1e-10,
                 "lambda_1 != 1");
    for (int k = 0; k < n; ++k) {
      check.expect(std::fabs(basis.eigenvalues[k]) <= 1.0 + 1e-10,
                   "|lambda| > 1");
      double xi_inf = 0.0, residual = 0.0;
      for (int i = 0; i < n; ++i)
        xi_inf = std::max(xi_inf, std::fabs(basis.right(i, k)));
      for (int i = 0; i < n; ++i) {
        double px = 0.0;
        for (int j = 0; j < n; ++j) px += markov.p(i, j) * basis.right(j, k);
        residual = std::max(
            residual,
            std::fabs(px - basis.eigenvalues[k] * basis.right(i, k)));
      }
      check.expect(residual <= 1e-8 * xi_inf, "eigen residual too large");
    }

    if (n <= 8) {
      const auto bg = bsdb::extract_background(span, eps, 1);
      const auto [oracle_raw, oracle_norm] =
          oracle::dense_extract_background(raw, eps, rows, cols);
      for (std::size_t i = 0; i < bg.raw.size(); ++i) {
        check.expect(
            std::fabs(bg.raw.data()[i] - oracle_raw.data()[i]) <= 1e-8,
            "raw background deviates from the dense oracle");
        check.expect(
            std::fabs(bg.normalized.data()[i] - oracle_norm.data()[i]) <= 1e-8,
            "normalized background deviates from the dense oracle");
      }
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 10.0,
               "runtime " + std::to_string(elapsed) + " s >= 10 s");
}

// 2. First projection coordinate vs per-pixel temporal mean.
void criterion_temporal_mean(Check& check) {
  std::mt19937 rng(10002);
  std::uniform_int_distribution<int> n_dist(3, 30);
  std::uniform_int_distribution<int> dim_dist(3, 10);
  for (int trial = 0; trial < 50 && check.ok; ++trial) {
    const auto cube =
        oracle::random_cube(rng, dim_dist(rng), dim_dist(rng), n_dist(rng));
    std::span<const Mat> span(cube.planes.data(), cube.planes.size());
    const auto basis = bsdb::spectral_decompose(bsdb::to_markov(
        bsdb::gaussian_kernel(span, bsdb::median_epsilon(span))));
    const auto proj = bsdb::project(span, basis, 1);

    const Mat mean = oracle::temporal_mean(cube);
    std::vector<double> first(proj.coords.rows());
    for (int i = 0; i < proj.coords.rows(); ++i) first[i] = proj.coords(i, 0);
    const double r = oracle::pearson(first, mean.data());
    check.expect(std::fabs(r - 1.0) <= 1e-9,
                 "Pearson correlation " + std::to_string(r));
  }
}

// 3. Incremental sliding-window kernel vs full recomputation, exactly.
void criterion_sliding_window(Check& check) {
  std::mt19937 rng(10003);
  std::uniform_real_distribution<double> value(0.0, 255.0);
  const int m = 7;
  std::vector<Mat> frames;
  for (int i = 0; i < m; ++i) {
    Mat f(6, 5);
    for (double& x : f.data()) x = value(rng);
    frames.push_back(std::move(f));
  }
  const double eps =
      bsdb::median_epsilon(std::span<const Mat>(frames.data(), m));
  bsdb::SlidingWindow window(frames, eps);

  for (int step = 0; step < 100; ++step) {
    Mat incoming(6, 5);
    for (double& x : incoming.data()) x = value(rng);
    window.slide(incoming);
    const auto rebuilt = bsdb::gaussian_kernel(window.frames(), eps);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        check.expect(rebuilt.w(i, j) == window.kernel().w(i, j),
                     "incremental kernel deviates at slide " +
                         std::to_string(step));
  }
}

// 4. SBSDB desk benchmark: mean IoU >= 0.8 with m = 5, within 5 s.
void criterion_sbsdb_benchmark(Check& check) {
  const auto start = Clock::now();
  const auto bench = bsdb::make_static_benchmark(20240);
  bsdb::PipelineConfig config;
  config.m = 5;
  const auto result = bsdb::run_sbsdb(bench.rtd, config);

  double mean_iou = 0.0;
  for (std::size_t t = 0; t < result.masks.size(); ++t)
    mean_iou += bsdb::mask_metrics(result.masks[t], bench.truth[t]).iou;
  mean_iou /= static_cast<double>(result.masks.size());
  check.expect(mean_iou >= 0.8,
               "mean IoU " + std::to_string(mean_iou) + " < 0.8");
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 5.0,
               "runtime " + std::to_string(elapsed) + " s >= 5 s");
}

// 5. DBSDB desk benchmark: training terminates, fused mean IoU >= 0.7, and
//    the DFS set relations hold on every frame.
void criterion_dbsdb_benchmark(Check& check) {
  const auto bench = bsdb::make_flicker_benchmark(20245);
  bsdb::PipelineConfig config;

  bsdb::TrainingTrace trace;
  const Datacube residuals =
      bsdb::run_sbsdb_no_threshold(bsdb::to_grayscale(bench.bgd), config);
  bsdb::DynamicBackground model;
  model.gray = bsdb::train_dynamic_background(residuals, config, &trace);
  model.rgb = bsdb::train_rgb(bench.bgd, config);
  check.expect(trace.iterations <= config.max_iterations,
               "training exceeded max_iterations");
  check.expect(trace.iterations >= 1, "training did not run");

  const auto result = bsdb::run_dbsdb(bench.rtd, model, config);
  double mean_iou = 0.0;
  for (std::size_t t = 0; t < result.fused.size(); ++t) {
    mean_iou += bsdb::mask_metrics(result.fused[t], bench.truth[t]).iou;

    const BinaryMask& fused = result.fused[t];
    const BinaryMask& gray = result.gray_masks[t];
    const BinaryMask& rgb = result.rgb_masks[t];
    for (std::size_t i = 0; i < fused.bits.size(); ++i)
      check.expect(!fused.bits[i] || gray.bits[i] || rgb.bits[i],
                   "fused mask outside rgb OR gray");
    // Components of rgb touching gray must be wholly included: the
    // flood-fill oracle produces exactly the component closure.
    check.expect(oracle::flood_fuse(gray, rgb) == fused,
                 "fused mask misses part of an intersecting rgb component");
  }
  mean_iou /= static_cast<double>(result.fused.size());
  check.expect(mean_iou >= 0.7,
               "fused mean IoU " + std::to_string(mean_iou) + " < 0.7");
}

// 6. dfs_fuse equals the brute-force flood-fill oracle, exactly.
void criterion_dfs_oracle(Check& check) {
  std::mt19937 rng(10006);
  std::uniform_real_distribution<double> density(0.02, 0.6);
  for (int trial = 0; trial < 1000 && check.ok; ++trial) {
    const BinaryMask gray = oracle::random_mask(rng, 32, 32, density(rng));
    const BinaryMask rgb = oracle::random_mask(rng, 32, 32, density(rng));
    const BinaryMask fused = bsdb::dfs_fuse(gray, rgb);
    check.expect(fused == oracle::flood_fuse(gray, rgb, &rng),
                 "dfs_fuse deviates from the flood-fill oracle at trial " +
                     std::to_string(trial));
  }
}

// 7. Block-parallel determinism and equivalence. Runs on the flat-background
//    crossing sequence: per-block renormalization is exact there, which is
//    what makes pixel-level equivalence with the unblocked pipeline
//    attainable at all.
void criterion_blocks(Check& check) {
  const auto bench = bsdb::make_flat_block_benchmark(20247);
  bsdb::PipelineConfig config;
  config.m = 5;
  const auto pipeline = [&config](const Datacube& sub) {
    return bsdb::run_sbsdb(sub, config).masks;
  };

  const auto plain = pipeline(bench.rtd);
  const auto one = bsdb::run_blocked(
      bench.rtd, bsdb::make_layout(64, 64, 1, 1, 20), pipeline);
  check.expect(one.size() == plain.size(), "mask count differs (1x1)");
  for (std::size_t t = 0; t < plain.size(); ++t)
    check.expect(one[t] == plain[t], "1x1 layout differs from sequential");

  const auto layout = bsdb::make_layout(64, 64, 2, 2, 20);
  const auto base = bsdb::run_blocked(bench.rtd, layout, pipeline, 1);
  for (int workers = 2; workers <= 4; ++workers) {
    const auto masks = bsdb::run_blocked(bench.rtd, layout, pipeline, workers);
    for (std::size_t t = 0; t < base.size(); ++t)
      check.expect(masks[t] == base[t],
                   "output depends on worker count " + std::to_string(workers));
  }

  // Shared global epsilon: non-overlap interior pixels match the unblocked
  // output.
  bsdb::PipelineConfig fixed = config;
  {
    std::vector<Mat> first(bench.rtd.planes.begin(),
                           bench.rtd.planes.begin() + config.m);
    fixed.epsilon =
        bsdb::median_epsilon(std::span<const Mat>(first.data(), first.size()));
  }
  const auto fixed_pipeline = [&fixed](const Datacube& sub) {
    return bsdb::run_sbsdb(sub, fixed).masks;
  };
  const auto blocked_fixed =
      bsdb::run_blocked(bench.rtd, layout, fixed_pipeline);
  const auto plain_fixed = fixed_pipeline(bench.rtd);

  std::vector<int> cover(64 * 64, 0);
  for (const auto& b : layout.blocks)
    for (int r = b.row0; r < b.row0 + b.rows; ++r)
      for (int c = b.col0; c < b.col0 + b.cols; ++c) ++cover[r * 64 + c];
  for (std::size_t t = 0; t < plain_fixed.size(); ++t)
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c)
        if (cover[r * 64 + c] == 1)
          check.expect(
              blocked_fixed[t].at(r, c) == plain_fixed[t].at(r, c),
              "interior pixel differs under a shared global epsilon");
}

// 8. Threshold scans vs the independent linear-scan oracle, plus the worked
//    histogram example.
void criterion_thresholds(Check& check) {
  {
    bsdb::Histogram hist;
    hist.smoothed.fill(8.0);
    hist.smoothed[0] = 50.0;
    hist.smoothed[1] = 30.0;
    hist.smoothed[2] = 18.0;
    hist.smoothed[3] = 12.0;
    hist.smoothed[4] = 9.0;
    hist.bins = hist.smoothed;
    const int th = bsdb::threshold_gray(hist, 2.0);
    check.expect(th == 4, "worked example gave Th = " + std::to_string(th));
    check.expect(oracle::scan_threshold_gray(hist.smoothed, 2.0) == 4,
                 "oracle disagrees on the worked example");
  }

  std::mt19937 rng(10008);
  std::uniform_real_distribution<double> value(0.0, 60.0);
  std::uniform_real_distribution<double> mu_dist(0.5, 8.0);
  for (int trial = 0; trial < 1000 && check.ok; ++trial) {
    bsdb::Histogram hist;
    for (double& x : hist.smoothed) x = value(rng);
    hist.bins = hist.smoothed;
    const double mu = mu_dist(rng);
    check.expect(bsdb::threshold_gray(hist, mu) ==
                     oracle::scan_threshold_gray(hist.smoothed, mu),
                 "threshold_gray deviates at trial " + std::to_string(trial));
    const auto got = bsdb::threshold_rgb_two_sided(hist, mu);
    const auto expected = oracle::scan_threshold_two_sided(hist.smoothed, mu);
    check.expect(got.first == expected.first && got.second == expected.second,
                 "threshold_rgb_two_sided deviates at trial " +
                     std::to_string(trial));
  }
}

// 9. Baseline oracles and the speckle size rule.
void criterion_baselines(Check& check) {
  std::mt19937 rng(10009);
  const Datacube cube = oracle::random_cube(rng, 16, 16, 10);
  const Datacube train = oracle::random_cube(rng, 16, 16, 10);

  {
    const auto got = bsdb::frame_diff(cube, 35.0);
    const auto expected = oracle::loop_frame_diff(cube, 35.0);
    for (std::size_t t = 0; t < got.size(); ++t)
      check.expect(got[t] == expected[t], "frame_diff deviates");
  }
  {
    const auto got = bsdb::mean_threshold(train, cube, 30.0);
    const auto expected = oracle::loop_mean_threshold(train, cube, 30.0);
    for (std::size_t t = 0; t < got.size(); ++t)
      check.expect(got[t] == expected[t], "mean_threshold deviates");
  }
  {
    const auto got = bsdb::temporal_median(cube, 4, 35.0);
    const auto expected = oracle::loop_temporal_median(cube, 4, 35.0);
    for (std::size_t t = 0; t < got.size(); ++t)
      check.expect(got[t] == expected[t], "temporal_median deviates");
  }

  // Rank-3 cube: reconstruction within 1e-8 of the dense covariance oracle.
  {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<Mat> patterns(3, Mat(12, 12));
    for (auto& p : patterns)
      for (double& x : p.data()) x = coeff(rng) * 50.0 + 100.0;
    auto combo = [&]() {
      Mat m(12, 12);
      const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
      for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = a * patterns[0].data()[i] + b * patterns[1].data()[i] +
                      c * patterns[2].data()[i];
      return m;
    };
    Datacube tr(12, 12, 1, 9), te(12, 12, 1, 5);
    for (int t = 0; t < 9; ++t) tr.plane(t) = combo();
    for (int t = 0; t < 5; ++t) te.plane(t) = combo();

    const auto model = bsdb::fit_eigen_background(tr, 3);
    const auto expected = oracle::dense_eigen_reconstruction(tr, te, 3);
    for (int t = 0; t < 5; ++t) {
      const Mat recon = bsdb::eigen_background_reconstruct(model, te.plane(t));
      for (std::size_t i = 0; i < recon.size(); ++i)
        check.expect(
            std::fabs(recon.data()[i] - expected[t].data()[i]) <= 1e-8,
            "eigen-background reconstruction deviates from the dense oracle");
    }
  }

  // Speckle rule: a 7-pixel island goes, an 8-pixel island stays.
  {
    BinaryMask mask(10, 20);
    for (int c = 0; c < 7; ++c) mask.at(2, c) = 1;
    for (int c = 10; c < 18; ++c) mask.at (6, c) = 1;
    const BinaryMask cleaned = bsdb::speckle_removal(mask);
    check.expect(cleaned.at(2, 0) == 0, "7-pixel island survived");
    for (int c = 10; c < 18; ++c)
      check.expect(cleaned.at(6, c) == 1, "8-pixel island was removed");
  }
}

// 10. The eval command runs BSDB plus all four baselines on both benchmarks
//     and BSDB beats frame_diff on the flicker benchmark.
void criterion_eval(Check& check) {
  const fs::path out = fs::temp_directory_path() / "bsdb_acceptance_eval";
  fs::remove_all(out);
  fs::create_directories(out);
  const std::string cmd = std::string(BSDB_CLI_PATH) + " eval --out-dir " +
                          out.string() + " --seed 7 > " +
                          (out / "stdout.txt").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  check.expect(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "eval exited nonzero");
  if (!check.ok) return;

  std::ifstream table(out / "eval_metrics.txt");
  check.expect(table.good(), "eval_metrics.txt missing");
  double bsdb_iou = -1.0, frame_diff_iou = -1.0;
  int rows = 0;
  std::string line;
  while (std::getline(table, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string bench_kv, method_kv, iou_kv;
    fields >> bench_kv >> method_kv >> iou_kv;
    if (bench_kv == "benchmark=flicker") {
      const double iou = std::stod(iou_kv.substr(iou_kv.find('=') + 1));
      if (method_kv == "method=bsdb") bsdb_iou = iou;
      if (method_kv == "method=frame_diff") frame_diff_iou = iou;
    }
  }
  check.expect(rows == 10, "expected 10 table rows, got " +
                               std::to_string(rows));
  check.expect(bsdb_iou >= 0.0 && frame_diff_iou >= 0.0,
               "missing flicker rows in the table");
  check.expect(bsdb_iou > frame_diff_iou,
               "BSDB IoU " + std::to_string(bsdb_iou) +
                   " does not exceed frame_diff " +
                   std::to_string(frame_diff_iou));
  fs::remove_all(out);
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"spectral correctness on 200 random datacubes (oracle match at n<=8)",
       criterion_spectral},
      {"first projection coordinate equals the temporal mean (Pearson 1)",
       criterion_temporal_mean},
      {"incremental sliding-window kernel exact over 100 slides",
       criterion_sliding_window},
      {"SBSDB synthetic benchmark mean IoU >= 0.8 (m=5)",
       criterion_sbsdb_benchmark},
      {"DBSDB synthetic benchmark: training terminates, fused IoU >= 0.7, "
       "DFS relations",
       criterion_dbsdb_benchmark},
      {"dfs_fuse equals the flood-fill oracle on 1000 random mask pairs",
       criterion_dfs_oracle},
      {"block-parallel determinism and sequential equivalence",
       criterion_blocks},
      {"threshold scans equal the linear-scan oracle (worked Th=4)",
       criterion_thresholds},
      {"baseline oracles exact; eigen reconstruction <= 1e-8; speckle size "
       "rule",
       criterion_baselines},
      {"eval harness: 10-row metrics table, BSDB beats frame_diff on "
       "flicker",
       criterion_eval},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].run(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    if (check.ok) {
      std::printf("PASS %2zu. %s\n", i + 1, criteria[i].name);
    } else {
      ++failures;
      std::printf("FAIL %2zu. %s -- %s\n", i + 1, criteria[i].name,
                  check.detail.c_str());
    }
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
