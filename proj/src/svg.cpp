#include "contagion/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace contagion {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (lo > hi) {
      lo = 0;
      hi = 1;
    } else if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

struct Frame {
  Range x, y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const {
    return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom);
  }
};

void open_doc(std::string& out, const PlotLabels& labels) {
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(labels.title) + "</text>\n";
}

void draw_axes(std::string& out, const Frame& f, const PlotLabels& labels) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out += "<g stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" +
         num(y0) + "\"/>\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
         num(y1) + "\"/>\n";
  out += "</g>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
    double yv = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    out += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" +
           tick_label(xv) + "</text>\n";
    out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(f.py(yv) + 4) + "\" text-anchor=\"end\">" +
           tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\">" + escape(labels.x) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num((y0 + y1) / 2) + ")\">" + escape(labels.y) + "</text>\n";
}

}  // namespace

std::string svg_line_plot(const PlotLabels& labels, std::span<const Series> series, LineStyle style) {
  Frame f;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        f.x.add(s.x[i]);
        f.y.add(s.y[i]);
      }
    }
  }
  f.x.finish();
  f.y.finish();

  std::string out;
  open_doc(out, labels);
  draw_axes(out, f, labels);
  const bool lines = style != LineStyle::Points;
  const bool points = style != LineStyle::Lines;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t m = std::min(s.x.size(), s.y.size());
    if (lines) {
      std::string path;
      bool pen_down = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          pen_down = false;
          continue;
        }
        path += pen_down ? " L" : (path.empty() ? "M" : " M");
        path += num(f.px(s.x[i])) + " " + num(f.py(s.y[i]));
        pen_down = true;
      }
      if (!path.empty()) {
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
      }
    }
    if (points) {
      for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out += "<circle cx=\"" + num(f.px(s.x[i])) + "\" cy=\"" + num(f.py(s.y[i])) +
               "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
      }
    }
    const double ly = kTop + 14 + 18 * double(k);
    out += "<rect x=\"" + num(kWidth - kRight + 12) + "\" y=\"" + num(ly - 9) +
           "\" width=\"12\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight + 30) + "\" y=\"" + num(ly) + "\">" +
           escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_histogram(const PlotLabels& labels, const Histogram& h) {
  Frame f;
  if (!h.counts.empty()) {
    f.x.add(h.edges.front());
    f.x.add(h.edges.back());
    f.y.add(0.0);
    for (auto c : h.counts) f.y.add(double(c));
  }
  f.x.finish();
  f.y.finish();
  if (!h.counts.empty()) f.y.lo = 0.0;

  std::string out;
  open_doc(out, labels);
  draw_axes(out, f, labels);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double x0 = f.px(h.edges[b]), x1 = f.px(h.edges[b + 1]);
    const double top = f.py(double(h.counts[b])), base = f.py(0.0);
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(top) + "\" width=\"" + num(std::max(0.0, x1 - x0)) +
           "\" height=\"" + num(base - top) + "\" fill=\"#1f77b4\" stroke=\"white\" data-count=\"" +
           std::to_string(h.counts[b]) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace contagion
