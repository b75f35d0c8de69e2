// CSV / JSON / SVG emitters.  Floats are written with 17 significant digits
// so that every file reloads to the exact doubles that were computed.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qwp/cli/runner.hpp"

namespace qwp::cli {

std::string version();
std::string format_double(double x);

struct Table {
  std::vector<std::string> metadata;  // '#' lines without the marker
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const Curve& curve,
               const json& scenario);
Table read_csv(const std::filesystem::path& path);

/// Per-column min, max, mean and the times of the extrema.
json column_stats(const std::vector<std::string>& columns,
                  const std::vector<std::vector<double>>& rows);

/// Static line plot of the curve's plot columns against time.
std::string render_svg(const Curve& curve);

struct OutputReport {
  std::vector<std::filesystem::path> files;
  std::vector<CheckResult> checks;  // run checks followed by reload checks
  json summary;
  bool passed = true;
};

/// Writes one CSV per curve, optional SVGs and summary.json into out_dir,
/// then reloads each CSV and verifies its statistics against the summary.
OutputReport write_outputs(const RunResult& result, const json& scenario,
                           const std::filesystem::path& out_dir, bool svg);

}  // namespace qwp::cli
