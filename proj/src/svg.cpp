#include "sketchbound/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sketchbound {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick spacing covering [lo, hi] with about `target` ticks.
std::vector<double> linear_ticks(double lo, double hi, int target = 6) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double i = std::ceil(lo / step); i * step <= hi + 1e-9 * step; i += 1.0) {
    ticks.push_back(i == 0.0 ? 0.0 : i * step);  // no "-0" label
  }
  return ticks;
}

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double a, double b) const {
    const double f = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                         : (v - lo) / (hi - lo);
    return a + f * (b - a);
  }
};

void pad(double& lo, double& hi, bool log) {
  if (!(hi > lo)) {
    const double d = log ? lo * 0.5 : std::max(std::abs(lo) * 0.1, 1.0);
    lo -= log ? d * 0.5 : d;
    hi += d;
    return;
  }
  if (log) {
    lo /= 1.15;
    hi *= 1.15;
  } else {
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
}

bool usable(double x, double y, bool log_x) {
  return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0);
}

void frame(std::ostringstream& out, const PlotSpec& spec, const Axis& ax, const Axis& ay) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(spec.title) << "</text>\n";
  out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";

  std::vector<double> xticks;
  if (ax.log) {
    for (double e = std::ceil(std::log10(ax.lo)); e <= std::floor(std::log10(ax.hi)); e += 1.0) {
      xticks.push_back(std::pow(10.0, e));
    }
    if (xticks.size() < 2) xticks = linear_ticks(ax.lo, ax.hi, 4);
  } else {
    xticks = linear_ticks(ax.lo, ax.hi);
  }
  for (double t : xticks) {
    if (t < ax.lo || t > ax.hi) continue;
    const double x = ax.map(t, x0, x1);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y0 + 5)
        << "\" stroke=\"black\"/><text x=\"" << num(x) << "\" y=\"" << num(y0 + 18)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : linear_ticks(ay.lo, ay.hi)) {
    const double y = ay.map(t, y0, y1);
    out << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/><text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label) << "</text>\n";
}

}  // namespace

std::string render_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i], spec.log_x)) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  if (!std::isfinite(xlo)) {
    xlo = 1.0;
    xhi = 10.0;
    ylo = 0.0;
    yhi = 1.0;
  }
  pad(xlo, xhi, spec.log_x);
  pad(ylo, yhi, false);
  const Axis ax{xlo, xhi, spec.log_x}, ay{ylo, yhi, false};

  std::ostringstream out;
  frame(out, spec, ax, ay);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (const auto& s : series) {
    if (s.style == PlotSeries::Style::Line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!usable(s.x[i], s.y[i], spec.log_x)) continue;
        out << num(ax.map(s.x[i], x0, x1)) << ',' << num(ay.map(s.y[i], y0, y1)) << ' ';
      }
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!usable(s.x[i], s.y[i], spec.log_x)) continue;
        out << "<circle cx=\"" << num(ax.map(s.x[i], x0, x1)) << "\" cy=\"" << num(ay.map(s.y[i], y0, y1))
            << "\" r=\"2.5\" fill=\"" << s.color << "\" fill-opacity=\"0.6\"/>\n";
      }
    }
  }
  // legend
  double ly = kTop + 10;
  for (const auto& s : series) {
    const double lx = kWidth - kRight + 15;
    if (s.style == PlotSeries::Style::Line) {
      out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
          << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    } else {
      out << "<circle cx=\"" << num(lx + 10) << "\" cy=\"" << num(ly) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    out << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_histogram_svg(const PlotSpec& spec, const std::vector<double>& lo,
                                 const std::vector<double>& hi, const std::vector<double>& counts) {
  const std::size_t bins = std::min({lo.size(), hi.size(), counts.size()});
  double xlo = bins ? lo.front() : 0.0, xhi = bins ? hi[bins - 1] : 1.0;
  double ymax = 1.0;
  for (std::size_t i = 0; i < bins; ++i) ymax = std::max(ymax, counts[i]);
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  const Axis ax{xlo, xhi, false}, ay{0.0, ymax * 1.05, false};

  std::ostringstream out;
  PlotSpec flat = spec;
  flat.log_x = false;
  frame(out, flat, ax, ay);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t i = 0; i < bins; ++i) {
    const double left = ax.map(lo[i], x0, x1), right = ax.map(hi[i], x0, x1);
    const double top = ay.map(counts[i], y0, y1);
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(std::max(right - left, 0.0))
        << "\" height=\"" << num(y0 - top) << "\" fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sketchbound
