#pragma once

#include <string>
#include <vector>

namespace socolab {

// Rows of preformatted cells; numbers go through format_number so output is
// reproducible byte-for-byte.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double x);
std::string to_csv(const CsvTable& table);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
CsvTable read_csv(const std::string& path);

struct PlotSeries {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

// Self-contained SVG line chart (no external assets).
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<PlotSeries>& series);

}  // namespace socolab
