#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "config.hpp"

namespace biphoton::cli {

namespace {

constexpr int kPanelW = 460;
constexpr int kPanelH = 330;
constexpr int kMarginL = 58;
constexpr int kMarginR = 16;
constexpr int kMarginT = 34;
constexpr int kMarginB = 44;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  int ox, oy;             // panel origin in the SVG

  double px(double x) const {
    return ox + kMarginL +
           (x - x0) / (x1 - x0) * (kPanelW - kMarginL - kMarginR);
  }
  double py(double y) const {
    return oy + kPanelH - kMarginB -
           (y - y0) / (y1 - y0) * (kPanelH - kMarginT - kMarginB);
  }
};

void draw_axes(std::ostringstream& svg, const Frame& f,
               const std::string& title, const std::string& x_label,
               const std::string& y_label) {
  svg << "<rect x='" << f.ox + kMarginL << "' y='" << f.oy + kMarginT
      << "' width='" << kPanelW - kMarginL - kMarginR << "' height='"
      << kPanelH - kMarginT - kMarginB
      << "' fill='none' stroke='black' stroke-width='1'/>\n";
  svg << "<text x='" << f.ox + kPanelW / 2 << "' y='" << f.oy + 20
      << "' font-family='sans-serif' font-size='13' text-anchor='middle'>"
      << escape(title) << "</text>\n";
  svg << "<text x='" << f.ox + kPanelW / 2 << "' y='" << f.oy + kPanelH - 10
      << "' font-family='sans-serif' font-size='11' text-anchor='middle'>"
      << escape(x_label) << "</text>\n";
  svg << "<text x='" << f.ox + 14 << "' y='" << f.oy + kPanelH / 2
      << "' font-family='sans-serif' font-size='11' text-anchor='middle' "
         "transform='rotate(-90 "
      << f.ox + 14 << " " << f.oy + kPanelH / 2 << ")'>" << escape(y_label)
      << "</text>\n";
  // Corner tick labels are enough for a quick read.
  svg << "<text x='" << f.ox + kMarginL << "' y='" << f.oy + kPanelH - 28
      << "' font-family='sans-serif' font-size='10'>" << num(f.x0)
      << "</text>\n";
  svg << "<text x='" << f.ox + kPanelW - kMarginR << "' y='"
      << f.oy + kPanelH - 28
      << "' font-family='sans-serif' font-size='10' text-anchor='end'>"
      << num(f.x1) << "</text>\n";
  svg << "<text x='" << f.ox + kMarginL - 4 << "' y='" << f.oy + kMarginT + 4
      << "' font-family='sans-serif' font-size='10' text-anchor='end'>"
      << num(f.y1) << "</text>\n";
}

void draw_histogram(std::ostringstream& svg, const Frame& f,
                    const CoincidenceHistogram& hist) {
  for (std::size_t i = 0; i < hist.bin_centers.size(); ++i) {
    svg << "<circle cx='" << num(f.px(hist.bin_centers[i])) << "' cy='"
        << num(f.py(static_cast<double>(hist.counts[i])))
        << "' r='2.4' fill='#1f4e8c'/>\n";
  }
  if (hist.fit) {
    svg << "<polyline fill='none' stroke='#c23b22' stroke-width='1.5' "
           "points='";
    const int samples = 240;
    for (int j = 0; j <= samples; ++j) {
      const double x = f.x0 + (f.x1 - f.x0) * j / samples;
      const double d = x - hist.fit->center;
      const double y = hist.fit->amplitude *
                       std::exp(-d * d / (2.0 * hist.fit->variance));
      svg << num(f.px(x)) << "," << num(f.py(y)) << " ";
    }
    svg << "'/>\n";
  }
}

Frame frame_for(const CoincidenceHistogram& hist, int ox, int oy) {
  double ymax = 1.0;
  for (std::uint64_t c : hist.counts)
    ymax = std::max(ymax, static_cast<double>(c));
  return {hist.bin_centers.front(), hist.bin_centers.back(), 0.0, 1.06 * ymax,
          ox, oy};
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string svg_document(int width, int height, const std::string& inner) {
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << " " << height
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
      << inner << "</svg>\n";
  return svg.str();
}

}  // namespace

void emit_plot(const CoincidenceHistogram& hist, const PlotStyle& style,
               const std::filesystem::path& path) {
  if (hist.bin_centers.empty())
    throw std::invalid_argument("emit_plot: empty histogram");
  std::ostringstream inner;
  const Frame f = frame_for(hist, 0, 0);
  draw_axes(inner, f, style.title, style.x_label, style.y_label);
  draw_histogram(inner, f, hist);
  write_file(path, svg_document(kPanelW, kPanelH, inner.str()));
}

void emit_panel_plot(std::span<const CoincidenceHistogram> hists,
                     std::span<const std::string> titles,
                     const std::filesystem::path& path) {
  if (hists.empty()) throw std::invalid_argument("emit_panel_plot: no data");
  if (titles.size() != hists.size())
    throw std::invalid_argument("emit_panel_plot: one title per histogram");
  const int cols = hists.size() > 1 ? 2 : 1;
  const int rows = static_cast<int>((hists.size() + cols - 1) / cols);
  std::ostringstream inner;
  for (std::size_t i = 0; i < hists.size(); ++i) {
    const int ox = static_cast<int>(i % cols) * kPanelW;
    const int oy = static_cast<int>(i / cols) * kPanelH;
    const Frame f = frame_for(hists[i], ox, oy);
    draw_axes(inner, f, titles[i], "scan coordinate", "coincidences");
    draw_histogram(inner, f, hists[i]);
  }
  write_file(path, svg_document(cols * kPanelW, rows * kPanelH, inner.str()));
}

void emit_curve_plot(std::span<const double> x, std::span<const double> y,
                     const PlotStyle& style,
                     const std::filesystem::path& path) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("emit_curve_plot: empty or mismatched data");
  Frame f{*std::min_element(x.begin(), x.end()),
          *std::max_element(x.begin(), x.end()),
          0.0,
          1.06 * *std::max_element(y.begin(), y.end()),
          0,
          0};
  if (f.x1 == f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 == 0.0) f.y1 = 1.0;
  std::ostringstream inner;
  draw_axes(inner, f, style.title, style.x_label, style.y_label);
  inner << "<polyline fill='none' stroke='#1f4e8c' stroke-width='1.5' "
           "points='";
  for (std::size_t i = 0; i < x.size(); ++i)
    inner << num(f.px(x[i])) << "," << num(f.py(y[i])) << " ";
  inner << "'/>\n";
  write_file(path, svg_document(kPanelW, kPanelH, inner.str()));
}

}  // namespace biphoton::cli
