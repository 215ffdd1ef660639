#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wavebox/decay.hpp"
#include "wavebox/errors.hpp"
#include "wavebox/io.hpp"
#include "wavebox/trace.hpp"

namespace wavebox {

struct PlotStyle {
  int width = 1000;
  int height = 600;
  bool loglog = false;
  std::string title;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string px(double v) { return fmt_double(std::round(v * 100.0) / 100.0); }

}  // namespace detail

// Standalone SVG of an energy trace, linear or log-log, with an optional
// power-law envelope overlay.
inline std::string plot_trace(const EnergyTrace& tr, const PlotStyle& style,
                              const DecayFit* fit = nullptr) {
  validate_trace(tr);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (style.loglog && (!(tr.t[i] > 0.0) || !(tr.energy[i] > 0.0))) continue;
    xs.push_back(style.loglog ? std::log10(tr.t[i]) : tr.t[i]);
    ys.push_back(style.loglog ? std::log10(tr.energy[i]) : tr.energy[i]);
  }
  if (xs.empty()) throw validation_error("nothing to plot after axis filtering");

  double x0 = *std::min_element(xs.begin(), xs.end());
  double x1 = *std::max_element(xs.begin(), xs.end());
  double y0 = *std::min_element(ys.begin(), ys.end());
  double y1 = *std::max_element(ys.begin(), ys.end());
  if (x1 - x0 <= 0.0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 <= 0.0) {
    double pad = std::abs(y0) * 0.1 + 1.0;
    y0 -= pad;
    y1 += pad;
  } else {
    double pad = (y1 - y0) * 0.05;
    y0 -= pad;
    y1 += pad;
  }

  const double ml = 80.0;
  const double mr = 20.0;
  const double mt = 40.0;
  const double mb = 55.0;
  const double w = static_cast<double>(style.width);
  const double h = static_cast<double>(style.height);
  auto map_x = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
  auto map_y = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mt - mb); };
  auto label_of = [&](double v) {
    return fmt_double(style.loglog ? std::pow(10.0, v) : v);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " +
         std::to_string(style.width) + " " + std::to_string(style.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<clipPath id=\"plot\"><rect x=\"" + detail::px(ml) + "\" y=\"" + detail::px(mt) +
         "\" width=\"" + detail::px(w - ml - mr) + "\" height=\"" + detail::px(h - mt - mb) +
         "\"/></clipPath>\n";
  svg += "<rect x=\"" + detail::px(ml) + "\" y=\"" + detail::px(mt) + "\" width=\"" +
         detail::px(w - ml - mr) + "\" height=\"" + detail::px(h - mt - mb) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    double fx = x0 + (x1 - x0) * k / 4.0;
    double fy = y0 + (y1 - y0) * k / 4.0;
    double gx = map_x(fx);
    double gy = map_y(fy);
    svg += "<line x1=\"" + detail::px(gx) + "\" y1=\"" + detail::px(h - mb) + "\" x2=\"" +
           detail::px(gx) + "\" y2=\"" + detail::px(h - mb + 6) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + detail::px(gx) + "\" y=\"" + detail::px(h - mb + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333\">" +
           detail::svg_escape(label_of(fx)) + "</text>\n";
    svg += "<line x1=\"" + detail::px(ml - 6) + "\" y1=\"" + detail::px(gy) + "\" x2=\"" +
           detail::px(ml) + "\" y2=\"" + detail::px(gy) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + detail::px(ml - 10) + "\" y=\"" + detail::px(gy + 4) +
           "\" font-size=\"12\" text-anchor=\"end\" fill=\"#333\">" +
           detail::svg_escape(label_of(fy)) + "</text>\n";
  }
  svg += "<text x=\"" + detail::px(ml + (w - ml - mr) / 2.0) + "\" y=\"" +
         detail::px(h - 12.0) + "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#333\">t" +
         std::string(style.loglog ? " (log)" : "") + "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::px(mt + (h - mt - mb) / 2.0) +
         "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#333\" transform=\"rotate(-90 18 " +
         detail::px(mt + (h - mt - mb) / 2.0) + ")\">energy" +
         std::string(style.loglog ? " (log)" : "") + "</text>\n";
  if (!style.title.empty()) {
    svg += "<text x=\"" + detail::px(w / 2.0) + "\" y=\"24\" font-size=\"16\" "
           "text-anchor=\"middle\" fill=\"#111\">" +
           detail::svg_escape(style.title) + "</text>\n";
  }

  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" "
         "clip-path=\"url(#plot)\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) svg += ' ';
    svg += detail::px(map_x(xs[i]));
    svg += ',';
    svg += detail::px(map_y(ys[i]));
  }
  svg += "\"/>\n";

  if (fit != nullptr) {
    svg += "<g class=\"fit\">\n<polyline fill=\"none\" stroke=\"#d62728\" "
           "stroke-width=\"1.5\" stroke-dasharray=\"6 4\" clip-path=\"url(#plot)\" points=\"";
    double lo = std::max(fit->t_lo, 1e-300);
    double hi = std::max(fit->t_hi, lo * (1.0 + 1e-12));
    const int segs = 64;
    for (int i = 0; i <= segs; ++i) {
      double t = style.loglog
                     ? std::pow(10.0, std::log10(lo) +
                                          (std::log10(hi) - std::log10(lo)) * i / double(segs))
                     : lo + (hi - lo) * i / double(segs);
      double e = fit->amplitude * std::pow(t, -fit->delta);
      double gx = style.loglog ? std::log10(t) : t;
      double gy = style.loglog ? std::log10(e) : e;
      if (i > 0) svg += ' ';
      svg += detail::px(map_x(gx));
      svg += ',';
      svg += detail::px(map_y(gy));
    }
    svg += "\"/>\n</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace wavebox
