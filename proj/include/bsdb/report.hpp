#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bsdb/errors.hpp"
#include "bsdb/mask.hpp"

namespace bsdb {

struct FrameRecord {
  int frame = 0;
  MaskMetrics metrics;
};

/// Per-frame scores plus their unweighted mean.
struct MetricsReport {
  std::vector<FrameRecord> frames;
  MaskMetrics mean;
};

inline MetricsReport evaluate_masks(const std::vector<BinaryMask>& predicted,
                                    const std::vector<BinaryMask>& truth) {
  if (predicted.size() != truth.size())
    throw ShapeError("mask count mismatch: " + std::to_string(predicted.size()) +
                     " predicted vs " + std::to_string(truth.size()) +
                     " truth");
  if (predicted.empty()) throw ParameterError("no masks to evaluate");
  MetricsReport report;
  report.frames.reserve(predicted.size());
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    const MaskMetrics m = mask_metrics(predicted[t], truth[t]);
    report.frames.push_back({static_cast<int>(t), m});
    report.mean.iou += m.iou;
    report.mean.precision += m.precision;
    report.mean.recall += m.recall;
  }
  const double n = static_cast<double>(predicted.size());
  report.mean.iou /= n;
  report.mean.precision /= n;
  report.mean.recall /= n;
  return report;
}

/// Machine-parsable key-value text, one record per frame plus an aggregate
/// line.
inline std::string format_report(const MetricsReport& report) {
  std::string out;
  char line[160];
  for (const FrameRecord& rec : report.frames) {
    std::snprintf(line, sizeof(line),
                  "frame=%d iou=%.6f precision=%.6f recall=%.6f\n", rec.frame,
                  rec.metrics.iou, rec.metrics.precision, rec.metrics.recall);
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "aggregate frames=%zu mean_iou=%.6f mean_precision=%.6f "
                "mean_recall=%.6f\n",
                report.frames.size(), report.mean.iou, report.mean.precision,
                report.mean.recall);
  out += line;
  return out;
}

inline void write_report(const std::string& path,
                         const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << format_report(report);
  if (!out) throw IoError("short write to " + path);
}

} // namespace bsdb
