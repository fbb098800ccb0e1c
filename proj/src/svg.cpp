#include "tbsa/svg.hpp"

#include "tbsa/snapshot_io.hpp"

#include <algorithm>
#include <ostream>

namespace tbsa {

void write_svg_chart(std::ostream& os, const std::string& title, const std::string& y_label,
                     const std::vector<ChartSeries>& series) {
  constexpr double width = 640.0, height = 400.0;
  constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double sd = s.stddev.empty() ? 0.0 : s.stddev[k];
      if (first) {
        x0 = x1 = s.x[k];
        y1 = s.mean[k] + sd;
        first = false;
      }
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.mean[k] - sd);
      y1 = std::max(y1, s.mean[k] + sd);
    }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };
  auto f = [](double v) { return format_double(static_cast<float>(v)); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << py(y0) << "\" x2=\"" << width - right << "\" y2=\"" << py(y0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
     << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << f(px(xv)) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">" << f(xv)
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << f(py(yv) + 4) << "\" text-anchor=\"end\">" << f(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">time [s]</text>\n";
  os << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
     << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";

  int legend = 0;
  for (const auto& s : series) {
    if (!s.stddev.empty() && !s.x.empty()) {
      os << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) os << f(px(s.x[k])) << ',' << f(py(s.mean[k] + s.stddev[k])) << ' ';
      for (std::size_t k = s.x.size(); k-- > 0;) os << f(px(s.x[k])) << ',' << f(py(s.mean[k] - s.stddev[k])) << ' ';
      os << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) os << f(px(s.x[k])) << ',' << f(py(s.mean[k])) << ' ';
    os << "\"/>\n";
    const double ly = top + 14.0 * legend++;
    os << "<text x=\"" << left + 10 << "\" y=\"" << ly + 4 << "\" fill=\"" << s.color << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace tbsa
