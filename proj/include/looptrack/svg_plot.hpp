#pragma once

// Minimal deterministic SVG charts: lifespan-vs-birth scatter and AUC-vs-k.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "looptrack/features.hpp"
#include "looptrack/sweep.hpp"

namespace looptrack {

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Axis upper bound: the data maximum rounded up to 1, 2 or 5 times a power of ten.
inline double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (v <= m * p * (1.0 + 1e-12)) return m * p;
  }
  return 10.0 * p;
}

struct Frame {
  double width = 640;
  double height = 480;
  double left = 70;
  double right = 20;
  double top = 40;
  double bottom = 60;
  double x_max = 1;
  double y_max = 1;
  double y_min = 0;

  double px(double x) const { return left + (width - left - right) * x / x_max; }
  double py(double y) const {
    return height - bottom - (height - top - bottom) * (y - y_min) / (y_max - y_min);
  }
};

inline void axes(std::string& svg, const Frame& f, std::string_view title, std::string_view x_label,
                 std::string_view y_label, int ticks = 5) {
  svg += "<text x=\"" + fmt(f.width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         xml_escape(title) + "</text>\n";
  svg += "<line x1=\"" + fmt(f.left) + "\" y1=\"" + fmt(f.height - f.bottom) + "\" x2=\"" +
         fmt(f.width - f.right) + "\" y2=\"" + fmt(f.height - f.bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(f.left) + "\" y1=\"" + fmt(f.top) + "\" x2=\"" + fmt(f.left) + "\" y2=\"" +
         fmt(f.height - f.bottom) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= ticks; ++i) {
    const double xv = f.x_max * i / ticks;
    const double yv = f.y_min + (f.y_max - f.y_min) * i / ticks;
    char xs[32];
    char ys[32];
    std::snprintf(xs, sizeof(xs), "%g", xv);
    std::snprintf(ys, sizeof(ys), "%g", yv);
    svg += "<text x=\"" + fmt(f.px(xv)) + "\" y=\"" + fmt(f.height - f.bottom + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + xs + "</text>\n";
    svg += "<text x=\"" + fmt(f.left - 6) + "\" y=\"" + fmt(f.py(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + ys + "</text>\n";
  }
  svg += "<text x=\"" + fmt((f.left + f.width - f.right) / 2) + "\" y=\"" + fmt(f.height - 16) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + xml_escape(x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt((f.top + f.height - f.bottom) / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
         fmt((f.top + f.height - f.bottom) / 2) + ")\">" + xml_escape(y_label) + "</text>\n";
}

inline std::string open_svg(const Frame& f) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt(f.width) + "\" height=\"" + fmt(f.height) + "\" viewBox=\"0 0 " + fmt(f.width) + " " +
         fmt(f.height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace detail

// One circle per record at (m1_birth, m1). Flagged selectors are drawn in
// red and labelled. Zero-lifespan records sit on the x axis.
inline std::string svg_lifespan_scatter(const std::vector<FeatureRecord>& records,
                                        const std::vector<std::string>& flagged,
                                        std::string_view title = "Max H1 lifespan vs birth") {
  const std::set<std::string> marked(flagged.begin(), flagged.end());
  detail::Frame f;
  double bx = 0.0;
  double ly = 0.0;
  for (const auto& r : records) {
    bx = std::max(bx, r.m1_birth);
    ly = std::max(ly, r.m1);
  }
  f.x_max = detail::nice_ceiling(bx);
  f.y_max = detail::nice_ceiling(ly);
  std::string svg = detail::open_svg(f);
  detail::axes(svg, f, title, "birth (km)", "lifespan m1 (km)");
  std::string labels;
  for (const auto& r : records) {
    const bool hit = marked.count(r.selector) > 0;
    svg += "<circle class=\"mark\" cx=\"" + detail::fmt(f.px(r.m1_birth)) + "\" cy=\"" +
           detail::fmt(f.py(r.m1)) + "\" r=\"" + (hit ? "5" : "3") + "\" fill=\"" +
           (hit ? "#d62728" : "#1f77b4") + "\" fill-opacity=\"0.8\"><title>" +
           detail::xml_escape(r.selector) + "</title></circle>\n";
    if (hit) {
      labels += "<text class=\"label\" x=\"" + detail::fmt(f.px(r.m1_birth) + 7) + "\" y=\"" +
                detail::fmt(f.py(r.m1) - 7) + "\" font-size=\"11\" fill=\"#d62728\">" +
                detail::xml_escape(r.selector) + "</text>\n";
    }
  }
  svg += labels;
  svg += "</svg>\n";
  return svg;
}

// AUC against k with the chosen k marked.
inline std::string svg_auc_curve(const SweepResult& result, std::string_view title = "AUC of m1 vs k") {
  detail::Frame f;
  double kmax = 0.0;
  double amin = 1.0;
  for (const auto& e : result.per_k) {
    kmax = std::max(kmax, e.k);
    amin = std::min(amin, e.auc);
  }
  f.x_max = detail::nice_ceiling(kmax);
  f.y_min = std::min(0.5, std::floor(amin * 10.0) / 10.0);
  f.y_max = 1.0;
  std::string svg = detail::open_svg(f);
  detail::axes(svg, f, title, "k (km/hr)", "AUC");
  std::vector<const KEvaluation*> sorted;
  for (const auto& e : result.per_k) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const KEvaluation* a, const KEvaluation* b) { return a->k < b->k; });
  std::string path;
  for (const auto* e : sorted) {
    path += (path.empty() ? "M" : " L") + detail::fmt(f.px(e->k)) + " " + detail::fmt(f.py(e->auc));
  }
  svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  for (const auto* e : sorted) {
    const bool chosen = e->k == result.chosen_k;
    svg += "<circle class=\"mark\" cx=\"" + detail::fmt(f.px(e->k)) + "\" cy=\"" + detail::fmt(f.py(e->auc)) +
           "\" r=\"" + (chosen ? "6" : "4") + "\" fill=\"" + (chosen ? "#d62728" : "#1f77b4") + "\"/>\n";
  }
  char note[64];
  std::snprintf(note, sizeof(note), "chosen k = %g", result.chosen_k);
  svg += "<text x=\"" + detail::fmt(f.width - f.right - 4) + "\" y=\"" + detail::fmt(f.top + 14) +
         "\" text-anchor=\"end\" font-size=\"12\">" + note + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace looptrack
