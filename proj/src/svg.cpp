#include "dalpha/svg.hpp"

#include "dalpha/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dalpha {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Roughly five "nice" ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

std::string render_line_chart(const std::vector<ChartSeries>& series, const ChartOptions& options) {
  if (series.empty()) throw UsageError("chart needs at least one series");

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  bool has_inf = false;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size())) {
      throw UsageError("series '" + s.name + "' has mismatched lengths");
    }
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      if (std::isinf(s.x[p])) {
        has_inf = true;
      } else {
        x_lo = std::min(x_lo, s.x[p]);
        x_hi = std::max(x_hi, s.x[p]);
      }
      if (!std::isfinite(s.y[p])) continue;
      const double e = s.err.empty() || !std::isfinite(s.err[p]) ? 0.0 : s.err[p];
      y_lo = std::min(y_lo, s.y[p] - e);
      y_hi = std::max(y_hi, s.y[p] + e);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (x_hi == x_lo) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }
  const double inf_x = x_hi + (x_hi - x_lo) * 0.1;
  const double x_max = has_inf ? inf_x : x_hi;
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double pad = (y_hi - y_lo) * 0.05;
  y_lo -= pad;
  y_hi += pad;

  const double left = 70, right = 170, top = 40, bottom = 60;
  const double w = options.width, h = options.height;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (std::isinf(x) ? inf_x - x_lo : x - x_lo) / (x_max - x_lo) * pw; };
  auto sy = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
         std::to_string(options.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           xml_escape(options.title) + "</text>\n";
  }

  out += "<g stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(left + pw) + "\" y2=\"" +
         fmt(top + ph) + "\"/>\n";
  out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(top + ph) +
         "\"/>\n";
  out += "</g>\n";

  out += "<g class=\"x-ticks\">\n";
  std::vector<double> xt = nice_ticks(x_lo, x_hi);
  for (double t : xt) {
    out += "<line x1=\"" + fmt(sx(t)) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(sx(t)) + "\" y2=\"" +
           fmt(top + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(sx(t)) + "\" y=\"" + fmt(top + ph + 18) + "\" text-anchor=\"middle\">" + tick_label(t) +
           "</text>\n";
  }
  if (has_inf) {
    out += "<text x=\"" + fmt(sx(inf_x)) + "\" y=\"" + fmt(top + ph + 18) + "\" text-anchor=\"middle\">inf</text>\n";
  }
  out += "</g>\n<g class=\"y-ticks\">\n";
  for (double t : nice_ticks(y_lo, y_hi)) {
    out += "<line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(sy(t)) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(sy(t)) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(sy(t) + 4) + "\" text-anchor=\"end\">" + tick_label(t) +
           "</text>\n";
  }
  out += "</g>\n";

  out += "<text class=\"x-label\" x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(h - 15) + "\" text-anchor=\"middle\">" +
         xml_escape(options.x_label) + "</text>\n";
  out += "<text class=\"y-label\" x=\"18\" y=\"" + fmt(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(top + ph / 2) + ")\">" + xml_escape(options.y_label) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    out += "<g class=\"series\" stroke=\"" + std::string(color) + "\">\n";
    std::string pts;
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      if (!std::isfinite(s.y[p])) continue;
      if (!pts.empty()) pts += ' ';
      pts += fmt(sx(s.x[p])) + "," + fmt(sy(s.y[p]));
    }
    out += "<polyline fill=\"none\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (std::size_t p = 0; p < s.x.size() && !s.err.empty(); ++p) {
      if (!std::isfinite(s.y[p]) || !std::isfinite(s.err[p])) continue;
      const double x = sx(s.x[p]);
      const double y0 = sy(s.y[p] - s.err[p]), y1 = sy(s.y[p] + s.err[p]);
      out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(y1) + "\"/>\n";
      out += "<line x1=\"" + fmt(x - 3) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x + 3) + "\" y2=\"" + fmt(y0) + "\"/>\n";
      out += "<line x1=\"" + fmt(x - 3) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x + 3) + "\" y2=\"" + fmt(y1) + "\"/>\n";
    }
    out += "</g>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(si);
    out += "<line x1=\"" + fmt(left + pw + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(left + pw + 40) + "\" y2=\"" +
           fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(left + pw + 45) + "\" y=\"" + fmt(ly + 4) + "\">" + xml_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dalpha
