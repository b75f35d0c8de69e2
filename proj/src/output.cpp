#include "qwp/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef QWP_VERSION
#define QWP_VERSION "unknown"
#endif

namespace qwp::cli {

namespace fs = std::filesystem;

std::string version() { return QWP_VERSION; }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const fs::path& path, const Curve& curve, const json& scenario) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "# qwp " << version() << "\n";
  out << "# units: hartree atomic units (hbar = e = m = 1)\n";
  out << "# curve: " << curve.name << "\n";
  out << "# curve_params: " << curve.params.dump() << "\n";
  out << "# scenario: " << scenario.dump() << "\n";
  for (std::size_t i = 0; i < curve.columns.size(); ++i)
    out << (i ? "," : "") << curve.columns[i];
  out << "\n";
  for (const auto& row : curve.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.metadata.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!header) {
      t.columns = fields;
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str()) throw std::runtime_error("bad number '" + f + "' in " + path.string());
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw std::runtime_error("ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

json column_stats(const std::vector<std::string>& columns,
                  const std::vector<std::vector<double>>& rows) {
  json out = json::object();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (rows.empty()) {
      out[columns[c]] = json::object();
      continue;
    }
    double lo = rows[0][c], hi = rows[0][c], sum = 0.0;
    double t_lo = rows[0][0], t_hi = rows[0][0];
    for (const auto& r : rows) {
      if (r[c] < lo) {
        lo = r[c];
        t_lo = r[0];
      }
      if (r[c] > hi) {
        hi = r[c];
        t_hi = r[0];
      }
      sum += r[c];
    }
    out[columns[c]] = {{"min", lo},
                       {"max", hi},
                       {"mean", sum / static_cast<double>(rows.size())},
                       {"t_at_min", t_lo},
                       {"t_at_max", t_hi}};
  }
  return out;
}

std::string render_svg(const Curve& curve) {
  constexpr double W = 800, H = 480, L = 90, R = 20, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::vector<std::size_t> cols;
  for (const auto& name : curve.plot_columns) {
    auto it = std::find(curve.columns.begin(), curve.columns.end(), name);
    if (it != curve.columns.end()) cols.push_back(static_cast<std::size_t>(it - curve.columns.begin()));
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!curve.rows.empty()) {
    x0 = curve.rows.front()[0];
    x1 = curve.rows.back()[0];
    y0 = y1 = cols.empty() ? 0.0 : curve.rows.front()[cols.front()];
    for (const auto& r : curve.rows)
      for (auto c : cols) {
        y0 = std::min(y0, r[c]);
        y1 = std::max(y1, r[c]);
      }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) {
    y0 -= 1;
    y1 += 1;
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << curve.name << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (y0 < 0 && y1 > 0)
    s << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(0) << "\" y2=\""
      << py(0) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    s << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    s << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << buf
      << "</text>\n";
  }
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << curve.columns.front() << " (a.u.)</text>\n";
  for (std::size_t k = 0; k < cols.size(); ++k) {
    s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[k % 5]
      << "\" points=\"";
    for (const auto& r : curve.rows) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(r[0]), py(r[cols[k]]));
      s << buf;
    }
    s << "\"/>\n";
    s << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 16 * k << "\" fill=\"" << colors[k % 5]
      << "\">" << curve.columns[cols[k]] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

OutputReport write_outputs(const RunResult& result, const json& scenario,
                           const fs::path& out_dir, bool svg) {
  fs::create_directories(out_dir);
  OutputReport report;
  report.checks = result.checks;
  const std::string prefix = scenario.value("scenario", std::string("run"));

  json curves = json::array();
  for (const Curve& curve : result.curves) {
    const fs::path csv = out_dir / (prefix + "_" + curve.name + ".csv");
    write_csv(csv, curve, scenario);
    report.files.push_back(csv);
    const json stats = column_stats(curve.columns, curve.rows);
    json entry = {{"name", curve.name},
                  {"file", csv.filename().string()},
                  {"rows", curve.rows.size()},
                  {"params", curve.params},
                  {"columns", stats}};
    if (svg) {
      const fs::path plot = out_dir / (prefix + "_" + curve.name + ".svg");
      std::ofstream(plot, std::ios::binary) << render_svg(curve);
      report.files.push_back(plot);
      entry["plot"] = plot.filename().string();
    }
    curves.push_back(std::move(entry));

    // Reload-and-recompute: the file alone must reproduce the statistics.
    bool same = false;
    std::string detail;
    try {
      const Table t = read_csv(csv);
      same = t.columns == curve.columns && t.rows.size() == curve.rows.size() &&
             column_stats(t.columns, t.rows) == stats;
      detail = same ? "statistics reproduced from file" : "statistics differ after reload";
    } catch (const std::exception& e) {
      detail = e.what();
    }
    report.checks.push_back({"reload " + csv.filename().string(), same, detail});
  }

  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    report.passed = report.passed && c.passed;
  }
  report.summary = {{"version", version()},
                    {"scenario", scenario},
                    {"curves", curves},
                    {"checks", checks},
                    {"details", result.extra},
                    {"passed", report.passed}};
  const fs::path summary = out_dir / (prefix + "_summary.json");
  std::ofstream out(summary, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + summary.string() + " for writing");
  out << report.summary.dump(2) << "\n";
  report.files.push_back(summary);
  return report;
}

}  // namespace qwp::cli
