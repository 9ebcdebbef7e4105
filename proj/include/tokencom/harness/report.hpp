#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tokencom/harness/config.hpp"

namespace tokencom::harness {

struct CompressionRow {
  std::string scale;  // "desk" or "paper"
  std::string mode;
  double bytes_per_episode = 0.0;
  double ratio_bench4_over_mode = 0.0;
};

struct CompressionReport {
  std::vector<CompressionRow> rows;
  // Fraction of test scenes with >= 2 objects where the coded-token payload
  // is smaller than the natural-language baseline payload.
  double frac_proposed_below_text_ge2 = 0.0;
};

CompressionReport compression_report(const RunConfig& cfg, const scenes::Dataset& data);
void write_compression_csv(const std::filesystem::path& path, const CompressionReport& rep);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal hand-written SVG line chart: axes, ticks, legend, polylines.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Locale-independent number formatting used by every CSV writer.
std::string fmt_num(double v);

}  // namespace tokencom::harness
