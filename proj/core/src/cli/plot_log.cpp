#include "imitate/cli/plot_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::cli {

namespace fs = std::filesystem;

int LogTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return static_cast<int>(k);
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

LogTable read_log_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read log " + path.string());
  LogTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      for (auto& c : cells) {
        c = trim(c);
        if (c.empty()) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": empty column name");
      }
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& raw : cells) {
      const std::string c = trim(raw);
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size()) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": non-numeric value '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw FormatError(path.string() + ": empty log file");
  if (t.rows.empty()) throw FormatError(path.string() + ": log has no data rows");
  return t;
}

LabeledLog parse_log_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos && eq > 0) return {spec.substr(0, eq), spec.substr(eq + 1)};
  return {fs::path(spec).stem().string(), spec};
}

std::vector<Series> build_series(const std::vector<std::pair<std::string, LogTable>>& logs, const std::string& stat) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const LogTable*>> groups;
  for (const auto& [label, table] : logs) {
    if (!groups.count(label)) order.push_back(label);
    groups[label].push_back(&table);
  }
  std::vector<Series> out;
  for (const auto& label : order) {
    const auto& members = groups[label];
    // sample counts present in every member
    std::set<double> common;
    bool first = true;
    for (const LogTable* t : members) {
      const int xs = t->column("samples");
      if (xs < 0) throw FormatError("log for '" + label + "' has no samples column");
      std::set<double> s;
      for (const auto& r : t->rows) s.insert(r[xs]);
      if (first) {
        common = s;
        first = false;
      } else {
        std::set<double> keep;
        std::set_intersection(common.begin(), common.end(), s.begin(), s.end(), std::inserter(keep, keep.begin()));
        common = keep;
      }
    }
    Series sr;
    sr.label = label;
    sr.members = static_cast<int>(members.size());
    for (double x : common) {
      double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
      int n = 0;
      for (const LogTable* t : members) {
        const int xs = t->column("samples");
        const int ys = t->column(stat);
        if (ys < 0) continue;
        for (const auto& r : t->rows) {
          if (r[xs] != x || !std::isfinite(r[ys])) continue;
          sum += r[ys];
          lo = std::min(lo, r[ys]);
          hi = std::max(hi, r[ys]);
          ++n;
          break;
        }
      }
      if (n == 0) continue;
      sr.x.push_back(x);
      sr.y.push_back(sum / n);
      sr.lo.push_back(lo);
      sr.hi.push_back(hi);
    }
    out.push_back(std::move(sr));
  }
  return out;
}

std::string render_svg(const std::string& title, const std::vector<Series>& series) {
  const double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.lo[k]);
      y1 = std::max(y1, s.hi[k]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y0 -= 0.5, y1 += 0.5;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << f(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << f(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">samples</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const Series& sr = series[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (sr.members > 1 && !sr.x.empty()) {
      os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t k = 0; k < sr.x.size(); ++k) os << f(px(sr.x[k])) << ',' << f(py(sr.hi[k])) << ' ';
      for (std::size_t k = sr.x.size(); k-- > 0;) os << f(px(sr.x[k])) << ',' << f(py(sr.lo[k])) << ' ';
      os << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < sr.x.size(); ++k) os << f(px(sr.x[k])) << ',' << f(py(sr.y[k])) << ' ';
    os << "\"/>\n";
    const double ly = T + 14 * static_cast<double>(s);
    os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\">" << escape(sr.label)
       << (sr.members > 1 ? " (n=" + std::to_string(sr.members) + ")" : "") << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<fs::path> plot_logs(const std::vector<LabeledLog>& logs, const fs::path& out_dir) {
  if (logs.empty()) throw InvalidArgument("plot_log: no log files given");
  std::vector<std::pair<std::string, LogTable>> tables;
  std::vector<std::string> stats;
  for (const auto& l : logs) {
    tables.emplace_back(l.label, read_log_csv(l.path));
    for (const auto& h : tables.back().second.header) {
      if (h == "samples" || h == "iteration" || h == "wall_time") continue;
      if (std::find(stats.begin(), stats.end(), h) == stats.end()) stats.push_back(h);
    }
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& stat : stats) {
    const fs::path p = out_dir / (stat + ".svg");
    write_text_file(p, render_svg(stat, build_series(tables, stat)));
    written.push_back(p);
  }
  return written;
}

}  // namespace imitate::cli
