#include "quadsim/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace quadsim {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// 1-2-5 tick spacing covering [lo, hi] with about `target` intervals.
std::vector<double> ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

std::string tick_label(double v) { return format_number(std::round(v * 1e6) / 1e6); }

}  // namespace

std::string_view format_name(ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Svg: return "svg";
    case ReportFormat::Text: return "text";
  }
  return "?";
}

std::vector<ReportFormat> all_formats() {
  return {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Svg, ReportFormat::Text};
}

std::vector<ReportFormat> parse_formats(std::string_view list) {
  std::vector<ReportFormat> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, end - start);
    bool found = false;
    for (ReportFormat f : all_formats()) {
      if (item == format_name(f)) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
        found = true;
      }
    }
    if (!found) throw ConfigError(fmt::format("unknown output format '{}' (expected json, csv, svg, text)", item));
    start = end + 1;
  }
  return out;
}

void TrialReport::add_metric(std::string name, double value, std::string unit) {
  metrics.push_back({std::move(name), value, std::move(unit)});
}

bool TrialReport::has_metric(std::string_view name) const {
  return std::any_of(metrics.begin(), metrics.end(), [&](const Metric& m) { return m.name == name; });
}

double TrialReport::metric(std::string_view name) const {
  for (const Metric& m : metrics) {
    if (m.name == name) return m.value;
  }
  throw DegenerateInputError(fmt::format("report '{}' has no metric '{}'", id, name));
}

TrialReport make_report(std::string id, const Config& config) {
  TrialReport r;
  r.id = std::move(id);
  r.seed = config.seed;
  r.config = to_json(config);
  return r;
}

Json report_json(const TrialReport& r) {
  Json j;
  j["schema"] = kReportSchema;
  j["id"] = r.id;
  j["seed"] = r.seed;
  j["complete"] = r.complete;
  Json metrics = Json::object();
  for (const Metric& m : r.metrics) metrics[m.name] = {{"value", number_json(m.value)}, {"unit", m.unit}};
  j["metrics"] = metrics;
  Json tables = Json::object();
  for (const TextTable& t : r.tables) tables[t.name] = {{"title", t.title}, {"header", t.header}, {"rows", t.rows}};
  j["tables"] = tables;
  j["notes"] = r.notes;
  j["config"] = r.config;
  return j;
}

std::string render_table(const TextTable& t) {
  const std::size_t cols = t.header.size();
  std::vector<std::size_t> width(cols, 0);
  for (std::size_t c = 0; c < cols; ++c) width[c] = t.header[c].size();
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < cols && c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      if (c == 0) {
        s += fmt::format("{:<{}}", cell, width[c]);
        s += " |";
      } else {
        s += fmt::format(" {:>{}}", cell, width[c]);
      }
    }
    return s + "\n";
  };
  std::string out = t.title + "\n" + line(t.header);
  std::size_t total = width[0] + 2;
  for (std::size_t c = 1; c < cols; ++c) total += width[c] + 1;
  out += std::string(width[0] + 1, '-') + "+" + std::string(total - width[0] - 2, '-') + "\n";
  for (const auto& row : t.rows) out += line(row);
  return out;
}

std::string render_svg(const Plot& p) {
  const double W = 720, H = 480, left = 80, right = 170, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const PlotSeries& s : p.series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad, xmax += xpad, ymin -= ypad, ymax += ypad;
  if (p.equal_aspect) {
    const double scale = std::max((xmax - xmin) / pw, (ymax - ymin) / ph);
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    xmin = cx - 0.5 * scale * pw, xmax = cx + 0.5 * scale * pw;
    ymin = cy - 0.5 * scale * ph, ymax = cy + 0.5 * scale * ph;
  }
  auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string s;
  s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
                   "font-family=\"sans-serif\" font-size=\"12\">\n", W, H, W, H);
  s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  s += fmt::format("<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", left + pw / 2,
                   escape_xml(p.title));
  for (double t : ticks(xmin, xmax, 8)) {
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#e0e0e0\"/>\n", X(t), top,
                     top + ph);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", X(t), top + ph + 16,
                     tick_label(t));
  }
  for (double t : ticks(ymin, ymax, 6)) {
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#e0e0e0\"/>\n", left, Y(t),
                     left + pw);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6, Y(t) + 4,
                     tick_label(t));
  }
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top, pw,
                   ph);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, H - 18,
                   escape_xml(p.x_label));
  s += fmt::format("<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
                   top + ph / 2, escape_xml(p.y_label));

  for (std::size_t i = 0; i < p.series.size(); ++i) {
    const PlotSeries& ser = p.series[i];
    const char* color = kPalette[i % kPalette.size()];
    if (ser.points) {
      for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
        if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) continue;
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n", X(ser.x[k]), Y(ser.y[k]), color);
      }
    } else {
      std::string pts;
      for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
        if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) continue;
        pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", X(ser.x[k]), Y(ser.y[k]));
      }
      s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n", color,
                       ser.dashed ? " stroke-dasharray=\"6 3\"" : "", pts);
    }
    const double ly = top + 14 + 18 * static_cast<double>(i);
    const double lx = left + pw + 12;
    if (ser.points) {
      s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"{}\"/>\n", lx + 10, ly - 4, color);
    } else {
      s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n", lx,
                       ly - 4, lx + 22, ly - 4, color, ser.dashed ? " stroke-dasharray=\"6 3\"" : "");
    }
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 28, ly, escape_xml(ser.label));
  }
  s += "</svg>\n";
  return s;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << content;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::vector<std::string> emit_report(const TrialReport& r, const std::filesystem::path& dir,
                                     std::span<const ReportFormat> formats) {
  if (r.metrics.empty()) throw DegenerateInputError(fmt::format("report '{}' has no metrics; nothing to emit", r.id));
  auto wants = [&](ReportFormat f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    written.push_back(name);
  };
  const std::string stem = r.id;

  if (wants(ReportFormat::Json)) write(stem + ".json", report_json(r).dump(2) + "\n");
  if (wants(ReportFormat::Csv)) {
    std::string csv = "metric,value,unit\n";
    for (const Metric& m : r.metrics) {
      csv += fmt::format("{},{},{}\n", csv_field(m.name), format_number(m.value), csv_field(m.unit));
    }
    write(stem + "_metrics.csv", csv);
    for (const TextTable& t : r.tables) {
      std::string tc;
      for (std::size_t c = 0; c < t.header.size(); ++c) tc += (c ? "," : "") + csv_field(t.header[c]);
      tc += "\n";
      for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) tc += (c ? "," : "") + csv_field(row[c]);
        tc += "\n";
      }
      write(fmt::format("{}_{}.csv", stem, t.name), tc);
    }
  }
  if (wants(ReportFormat::Text)) {
    std::string text = fmt::format("{} (seed {}){}\n\n", r.id, r.seed, r.complete ? "" : " INCOMPLETE");
    for (const TextTable& t : r.tables) text += render_table(t) + "\n";
    text += "Metrics\n";
    std::size_t width = 0;
    for (const Metric& m : r.metrics) width = std::max(width, m.name.size());
    for (const Metric& m : r.metrics) {
      text += fmt::format("  {:<{}}  {}{}\n", m.name, width, format_number(m.value), m.unit.empty() ? "" : " " + m.unit);
    }
    if (!r.notes.empty()) {
      text += "\nNotes\n";
      for (const std::string& n : r.notes) text += "  - " + n + "\n";
    }
    write(stem + ".txt", text);
  }
  if (wants(ReportFormat::Svg)) {
    for (const Plot& p : r.plots) write(fmt::format("{}_{}.svg", stem, p.name), render_svg(p));
  }
  for (const ReportFile& f : r.files) {
    if (wants(f.format)) write(f.name, f.content);
  }
  return written;
}

}  // namespace quadsim
