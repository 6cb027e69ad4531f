#pragma once

// Trial reports and their deterministic file outputs: JSON, CSV, plain-text
// tables and self-contained SVG plots.

#include "quadsim/config.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace quadsim {

inline constexpr const char* kReportSchema = "quadsim.report/1";

enum class ReportFormat { Json, Csv, Svg, Text };

std::string_view format_name(ReportFormat f);
// Comma-separated list, e.g. "json,csv,svg,text". Throws ConfigError.
std::vector<ReportFormat> parse_formats(std::string_view list);
std::vector<ReportFormat> all_formats();

struct Metric {
  std::string name;
  double value = 0.0;
  std::string unit;
};

struct TextTable {
  std::string name;   // file stem
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
  bool points = false;  // markers instead of a polyline
};

struct Plot {
  std::string name;  // file stem
  std::string title;
  std::string x_label, y_label;
  std::vector<PlotSeries> series;
  bool equal_aspect = false;
};

struct ReportFile {
  std::string name;  // relative path
  ReportFormat format = ReportFormat::Csv;
  std::string content;
};

struct TrialReport {
  std::string id;
  std::uint64_t seed = 0;
  Json config;
  bool complete = true;
  std::vector<Metric> metrics;
  std::vector<TextTable> tables;
  std::vector<Plot> plots;
  std::vector<ReportFile> files;
  std::vector<std::string> notes;

  void add_metric(std::string name, double value, std::string unit = "");
  // Throws DegenerateInputError when absent.
  double metric(std::string_view name) const;
  bool has_metric(std::string_view name) const;
};

// Starts a report carrying the resolved configuration and seed.
TrialReport make_report(std::string id, const Config& config);

Json report_json(const TrialReport& report);
std::string render_table(const TextTable& table);
std::string render_svg(const Plot& plot);

// Writes the requested formats into `dir` and returns the written paths
// relative to it. Throws DegenerateInputError for a report without metrics
// and IoError when the destination cannot be written.
std::vector<std::string> emit_report(const TrialReport& report, const std::filesystem::path& dir,
                                     std::span<const ReportFormat> formats);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace quadsim
