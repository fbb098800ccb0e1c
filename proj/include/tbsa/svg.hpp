#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tbsa {

struct ChartSeries {
  std::string name;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;  // empty for no band
};

// Line chart with optional +-1 std bands.
void write_svg_chart(std::ostream& os, const std::string& title, const std::string& y_label,
                     const std::vector<ChartSeries>& series);

}  // namespace tbsa
