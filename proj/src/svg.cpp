#include "fixproc/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fixproc::svg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Rgb {
  double r, g, b;
};

std::string hex(Rgb c) {
  char buf[8];
  auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(c.r), byte(c.g), byte(c.b));
  return buf;
}

Rgb lerp(Rgb a, Rgb b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

// Five-stop sequential ramp, dark blue through teal and green to yellow.
Rgb sequential(double t) {
  static constexpr std::array<Rgb, 5> stops = {
      Rgb{0.27, 0.00, 0.33}, Rgb{0.23, 0.32, 0.55}, Rgb{0.13, 0.57, 0.55},
      Rgb{0.37, 0.79, 0.38}, Rgb{0.99, 0.91, 0.14}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  return lerp(stops[i], stops[i + 1], t - static_cast<double>(i));
}

Rgb diverging_ramp(double t) {
  const Rgb blue{0.13, 0.40, 0.67};
  const Rgb white{0.97, 0.97, 0.97};
  const Rgb red{0.70, 0.09, 0.17};
  t = std::clamp(t, -1.0, 1.0);
  return t < 0.0 ? lerp(white, blue, -t) : lerp(white, red, t);
}

}  // namespace

std::string heatmap(const GridGeometry& g, std::span<const double> values, const std::string& title,
                    bool diverging) {
  const double scale = 600.0 / std::max(g.window.width(), g.window.height());
  const double w = g.window.width() * scale;
  const double h = g.window.height() * scale;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double amp = std::max(std::abs(lo), std::abs(hi));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w + 20) << "\" height=\""
      << fmt(h + 40) << "\">\n";
  out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
      << "</text>\n<g transform=\"translate(10,30)\" shape-rendering=\"crispEdges\">\n";
  const double cw = g.cell_width() * scale;
  const double ch = g.cell_height() * scale;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const double v = values[g.index(ix, iy)];
      Rgb c;
      if (!std::isfinite(v)) {
        c = {0.5, 0.5, 0.5};
      } else if (diverging) {
        c = diverging_ramp(amp > 0.0 ? v / amp : 0.0);
      } else {
        c = sequential(hi > lo ? (v - lo) / (hi - lo) : 0.0);
      }
      out << "<rect x=\"" << fmt(ix * cw) << "\" y=\"" << fmt(iy * ch) << "\" width=\""
          << fmt(cw + 0.05) << "\" height=\"" << fmt(ch + 0.05) << "\" fill=\"" << hex(c)
          << "\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string panels(const std::vector<Panel>& panels, int columns) {
  constexpr double pw = 320.0;
  constexpr double ph = 240.0;
  constexpr double margin = 45.0;
  columns = std::max(1, columns);
  const int rows = static_cast<int>((panels.size() + static_cast<std::size_t>(columns) - 1) /
                                    static_cast<std::size_t>(columns));
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(columns * pw) << "\" height=\""
      << fmt(std::max(1, rows) * ph) << "\" font-family=\"sans-serif\">\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& p = panels[i];
    const double ox = static_cast<double>(static_cast<int>(i) % columns) * pw;
    const double oy = static_cast<double>(static_cast<int>(i) / columns) * ph;
    const double iw = pw - margin - 10.0;
    const double ih = ph - margin - 25.0;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : p.series) {
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        x0 = std::min(x0, s.x[k]);
        x1 = std::max(x1, s.x[k]);
        y0 = std::min(y0, s.y[k]);
        y1 = std::max(y1, s.y[k]);
      }
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    if (!std::isfinite(x0)) { x0 = 0.0; x1 = 1.0; }
    if (!std::isfinite(y0)) { y0 = 0.0; y1 = 1.0; }
    auto sx = [&](double x) { return ox + margin + (x - x0) / (x1 - x0) * iw; };
    auto sy = [&](double y) { return oy + 20.0 + ih - (y - y0) / (y1 - y0) * ih; };

    out << "<g>\n<text x=\"" << fmt(ox + margin) << "\" y=\"" << fmt(oy + 14) << "\" font-size=\"12\">"
        << escape(p.title) << "</text>\n";
    out << "<rect x=\"" << fmt(ox + margin) << "\" y=\"" << fmt(oy + 20) << "\" width=\"" << fmt(iw)
        << "\" height=\"" << fmt(ih) << "\" fill=\"none\" stroke=\"#888888\"/>\n";
    out << "<text x=\"" << fmt(ox + margin) << "\" y=\"" << fmt(oy + ph - 8) << "\" font-size=\"10\">"
        << escape(p.x_label) << " [" << fmt(x0) << ", " << fmt(x1) << "]</text>\n";
    out << "<text x=\"" << fmt(ox + 4) << "\" y=\"" << fmt(oy + 34) << "\" font-size=\"10\">"
        << escape(p.y_label) << "</text>\n";
    out << "<text x=\"" << fmt(ox + 4) << "\" y=\"" << fmt(oy + 20 + ih) << "\" font-size=\"9\">"
        << fmt(y0) << "</text>\n<text x=\"" << fmt(ox + 4) << "\" y=\"" << fmt(oy + 46)
        << "\" font-size=\"9\">" << fmt(y1) << "</text>\n";
    for (const auto& s : p.series) {
      std::ostringstream path;
      bool pen_down = false;
      double last_y = 0.0;
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
          pen_down = false;
          continue;
        }
        if (!pen_down) {
          path << "M" << fmt(sx(s.x[k])) << "," << fmt(sy(s.y[k]));
          pen_down = true;
        } else if (s.step) {
          path << " L" << fmt(sx(s.x[k])) << "," << fmt(sy(last_y)) << " L" << fmt(sx(s.x[k])) << ","
               << fmt(sy(s.y[k]));
        } else {
          path << " L" << fmt(sx(s.x[k])) << "," << fmt(sy(s.y[k]));
        }
        last_y = s.y[k];
      }
      out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"" << fmt(s.width) << "\"" << (s.dashed ? " stroke-dasharray=\"4,3\"" : "")
          << "/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fixproc::svg
