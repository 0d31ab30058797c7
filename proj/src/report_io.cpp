#include "socolab/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace socolab {

std::string format_number(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    os << (i ? "," : "") << table.header[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_file(path);
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = cells;
      first = false;
    } else {
      table.rows.push_back(cells);
    }
  }
  return table;
}

namespace {

struct Range {
  double lo = 0.0, hi = 1.0;
  void expand(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series) {
  const int W = 760, H = 480;
  const int ml = 80, mr = 180, mt = 48, mb = 56;
  Range xr, yr;
  bool any = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!any) {
        xr.lo = xr.hi = s.xs[i];
        yr.lo = yr.hi = s.ys[i];
        any = true;
      }
      xr.expand(s.xs[i]);
      yr.expand(s.ys[i]);
    }
  if (xr.hi <= xr.lo) xr.hi = xr.lo + 1.0;
  if (yr.hi <= yr.lo) yr.hi = yr.lo + 1.0;

  const auto X = [&](double x) {
    return ml + (x - xr.lo) / (xr.hi - xr.lo) * (W - ml - mr);
  };
  const auto Y = [&](double y) {
    return H - mb - (y - yr.lo) / (yr.hi - yr.lo) * (H - mt - mb);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes with 5 ticks each
  os << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" "
     << "font-size=\"11\" fill=\"#222\">\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
     << "\" y2=\"" << H - mb << "\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
     << "\" y2=\"" << H - mb << "\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    os << "<line x1=\"" << X(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << X(xv)
       << "\" y2=\"" << H - mb + 5 << "\"/>\n";
    os << "<text x=\"" << X(xv) << "\" y=\"" << H - mb + 18
       << "\" text-anchor=\"middle\" stroke=\"none\">" << fmt_tick(xv)
       << "</text>\n";
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << ml
       << "\" y2=\"" << Y(yv) << "\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << Y(yv) + 4
       << "\" text-anchor=\"end\" stroke=\"none\">" << fmt_tick(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
     << "\" text-anchor=\"middle\" stroke=\"none\">" << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
     << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 18 "
     << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";
  os << "</g>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      char pt[64];
      std::snprintf(pt, sizeof(pt), "%.2f,%.2f ", X(s.xs[i]), Y(s.ys[i]));
      os << pt;
    }
    os << "\"/>\n";
    const int ly = mt + 18 * static_cast<int>(si);
    os << "<line x1=\"" << W - mr + 12 << "\" y1=\"" << ly << "\" x2=\""
       << W - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - mr + 40 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace socolab
