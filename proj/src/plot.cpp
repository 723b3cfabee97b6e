#include "tfp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tfp::plot {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_int(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f", v);
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

struct Curve {
  std::string label;
  std::string dash;
  std::vector<std::pair<double, double>> points;  // (k, log10 value)
};

double clamp_log(double v) { return std::log10(std::max(v, kLogFloor)); }

}  // namespace

Series series_from_string(const std::string& s) {
  if (s == "gap") return Series::gap;
  if (s == "residual") return Series::residual;
  if (s == "bound") return Series::bound;
  throw InvalidArgument("unknown series '" + s + "' (expected gap, residual or bound)");
}

std::string to_string(Series s) {
  switch (s) {
    case Series::gap: return "gap";
    case Series::residual: return "residual";
    case Series::bound: return "bound";
  }
  return "?";
}

std::string render_svg(const std::vector<LabeledTrace>& traces, const std::vector<Series>& series) {
  std::vector<Curve> curves;
  for (const auto& t : traces) {
    for (Series s : series) {
      auto add = [&](const std::string& name, const std::string& dash, auto value) {
        Curve c{t.label + " " + name, dash, {}};
        for (const auto& r : t.rows) c.points.emplace_back(static_cast<double>(r.k), clamp_log(value(r)));
        curves.push_back(std::move(c));
      };
      switch (s) {
        case Series::gap: add("gap", "", [](const io::TraceRow& r) { return r.thompson_gap; }); break;
        case Series::bound: add("bound", "6,4", [](const io::TraceRow& r) { return r.error_bound; }); break;
        case Series::residual:
          add("residual1", "2,3", [](const io::TraceRow& r) { return r.residual1; });
          add("residual2", "8,3,2,3", [](const io::TraceRow& r) { return r.residual2; });
          break;
      }
    }
  }

  double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin;
  double ymin = kmin, ymax = -kmin;
  for (const auto& c : curves)
    for (const auto& [k, y] : c.points) {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(kmin)) {
    kmin = 0;
    kmax = 1;
    ymin = -1;
    ymax = 0;
  }
  if (kmax <= kmin) {
    kmin -= 1;
    kmax += 1;
  }
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) {
    ymin -= 1;
    ymax += 1;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double k) { return kLeft + (k - kmin) / (kmax - kmin) * plot_w; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
         "Convergence behaviour</text>\n";

  // Decade ticks; thinned so at most ~12 labels are drawn.
  const int decades = static_cast<int>(ymax - ymin);
  const int ystep = std::max(1, (decades + 11) / 12);
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += ystep) {
    const double y = py(e);
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft + plot_w) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" + std::to_string(e) + "</text>\n";
  }

  const double span = kmax - kmin;
  const double raw_step = span / 10.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double kstep = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw_step) {
      kstep = mag * m;
      break;
    }
  kstep = std::max(kstep, 1.0);
  for (double k = std::ceil(kmin / kstep) * kstep; k <= kmax + 1e-9; k += kstep) {
    const double x = px(k);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop + plot_h) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
           fmt(kTop + plot_h + 5) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + plot_h + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + fmt_int(k) +
           "</text>\n";
  }

  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(plot_w) + "\" height=\"" +
         fmt(plot_h) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">iteration k</text>\n";
  svg += "<text x=\"20\" y=\"" + fmt(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 " +
         fmt(kTop + plot_h / 2) + ")\">value (log scale)</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Curve& c = curves[i];
    const std::string color = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (const auto& [k, y] : c.points) {
      if (!pts.empty()) pts += ' ';
      pts += fmt(px(k)) + "," + fmt(py(y));
    }
    if (c.points.size() > 1) {
      svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
      if (!c.dash.empty()) svg += " stroke-dasharray=\"" + c.dash + "\"";
      svg += " points=\"" + pts + "\"/>\n";
    }
    for (const auto& [k, y] : c.points)
      svg += "<circle cx=\"" + fmt(px(k)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"2\" fill=\"" + color + "\"/>\n";

    const double ly = kTop + 16 + 16 * static_cast<double>(i);
    const double lx = kLeft + plot_w - 220;
    svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(lx + 24) + "\" y2=\"" + fmt(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"";
    if (!c.dash.empty()) svg += " stroke-dasharray=\"" + c.dash + "\"";
    svg += "/>\n";
    svg += "<text x=\"" + fmt(lx + 30) + "\" y=\"" + fmt(ly) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(c.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tfp::plot
