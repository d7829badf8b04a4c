#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glab/config.hpp"
#include "glab/csv.hpp"
#include "glab/digest.hpp"
#include "glab/error.hpp"
#include "glab/shape.hpp"
#include "glab/stats.hpp"

namespace glab {

// Plot specs are either a path to a "key = value" file or an inline string
// such as "deviation;quantile=0.9;output=dev.svg". A bare word is the preset.
// Presets: deviation, convergence, shape, event-a, containment, xy (with
// x=, y= and optional err= columns).

struct PlotSpec {
  std::string preset;
  double quantile = 0.5;
  std::string output;
  std::string title;
  std::string x;
  std::string y;
  std::string err;
  std::optional<bool> log_x;
  std::optional<bool> log_y;
};

inline PlotSpec parse_plot_spec(std::string_view text) {
  std::string body;
  if (std::filesystem::is_regular_file(std::filesystem::path(std::string(text)))) {
    body = read_file(std::string(text));
  } else {
    body = std::string(text);
    std::replace(body.begin(), body.end(), ';', '\n');
  }
  PlotSpec spec;
  auto to_bool = [](std::string_view key, std::string_view v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw DomainError("plot spec '" + std::string(key) + "' must be true or false");
  };
  std::string_view rest = body;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      spec.preset = std::string(line);
      continue;
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key == "preset") spec.preset = value;
    else if (key == "quantile") spec.quantile = detail::parse_number<double>(key, value);
    else if (key == "output") spec.output = value;
    else if (key == "title") spec.title = value;
    else if (key == "x") spec.x = value;
    else if (key == "y") spec.y = value;
    else if (key == "err") spec.err = value;
    else if (key == "log_x") spec.log_x = to_bool(key, value);
    else if (key == "log_y") spec.log_y = to_bool(key, value);
    else throw DomainError("unknown plot spec key '" + std::string(key) + "'");
  }
  if (spec.preset.empty()) throw DomainError("plot spec names no preset");
  return spec;
}

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double lo = 0.0;  // error bar extent
  double hi = 0.0;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotPoint> points;
  std::vector<std::pair<double, double>> curve;  // fitted overlay, data coordinates
  std::string annotation;
};

namespace detail {

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
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

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double t(double v) const { return log ? std::log10(v) : v; }
  double map(double v) const {
    const double a = t(lo), b = t(hi);
    const double f = b > a ? (t(v) - a) / (b - a) : 0.5;
    return pixel_lo + f * (pixel_hi - pixel_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double d = std::floor(std::log10(lo)); d <= std::ceil(std::log10(hi)); d += 1.0)
        for (double m : {1.0, 2.0, 5.0}) {
          const double v = m * std::pow(10.0, d);
          if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
        }
      if (out.size() > 9) {
        std::vector<double> thinned;
        for (double v : out)
          if (std::abs(std::log10(v) - std::round(std::log10(v))) < 1e-9) thinned.push_back(v);
        out = thinned;
      }
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
      out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    return out;
  }
};

inline Axis make_axis(std::vector<double> values, bool log, double pixel_lo, double pixel_hi) {
  Axis a;
  a.log = log;
  a.pixel_lo = pixel_lo;
  a.pixel_hi = pixel_hi;
  if (log) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !(v > 0.0); }), values.end());
    if (values.empty()) throw DomainError("log axis needs positive values");
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (log) {
    if (hi <= lo) {
      lo /= 2.0;
      hi *= 2.0;
    } else {
      const double pad = std::pow(hi / lo, 0.05);
      lo /= pad;
      hi *= pad;
    }
  } else {
    if (hi <= lo) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    } else {
      const double pad = (hi - lo) * 0.05;
      lo -= pad;
      hi += pad;
    }
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace detail

/// Self-contained SVG with error bars, an optional fitted overlay and an
/// annotation. Coordinates are printed with fixed precision, so equal inputs
/// give equal bytes.
inline std::string render_svg(const Plot& plot) {
  if (plot.points.empty()) throw DomainError("nothing to plot");
  constexpr double W = 640, H = 440, L = 70, R = 20, T = 40, B = 60;
  std::vector<double> xs, ys;
  for (const auto& p : plot.points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    ys.push_back(p.lo);
    ys.push_back(p.hi);
  }
  for (const auto& [x, y] : plot.curve) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const auto ax = detail::make_axis(xs, plot.log_x, L, W - R);
  const auto ay = detail::make_axis(ys, plot.log_y, H - B, T);
  using detail::fmt;
  const auto px = [&](double v) { return fmt("%.2f", ax.map(v)); };
  const auto py = [&](double v) { return fmt("%.2f", ay.map(v)); };
  auto visible_y = [&](double v) { return !plot.log_y || v > 0.0; };
  auto visible_x = [&](double v) { return !plot.log_x || v > 0.0; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" viewBox=\"0 0 640 440\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  if (!plot.title.empty())
    s += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + detail::xml_escape(plot.title) +
         "</text>\n";
  s += "<g stroke=\"#444\" fill=\"none\">\n";
  s += "<line x1=\"70\" y1=\"380\" x2=\"620\" y2=\"380\"/>\n<line x1=\"70\" y1=\"380\" x2=\"70\" y2=\"40\"/>\n";
  s += "</g>\n<g fill=\"#222\">\n";
  for (double t : ax.ticks()) {
    s += "<line x1=\"" + px(t) + "\" y1=\"380\" x2=\"" + px(t) + "\" y2=\"385\" stroke=\"#444\"/>";
    s += "<text x=\"" + px(t) + "\" y=\"398\" text-anchor=\"middle\">" + fmt("%g", t) + "</text>\n";
  }
  for (double t : ay.ticks()) {
    s += "<line x1=\"65\" y1=\"" + py(t) + "\" x2=\"70\" y2=\"" + py(t) + "\" stroke=\"#444\"/>";
    s += "<text x=\"62\" y=\"" + fmt("%.2f", ay.map(t) + 4) + "\" text-anchor=\"end\">" + fmt("%g", t) +
         "</text>\n";
  }
  s += "<text x=\"345\" y=\"425\" text-anchor=\"middle\">" + detail::xml_escape(plot.x_label) +
       (plot.log_x ? " (log)" : "") + "</text>\n";
  s += "<text x=\"18\" y=\"210\" text-anchor=\"middle\" transform=\"rotate(-90 18 210)\">" +
       detail::xml_escape(plot.y_label) + (plot.log_y ? " (log)" : "") + "</text>\n";
  s += "</g>\n";

  if (plot.curve.size() >= 2) {
    std::string d;
    for (const auto& [x, y] : plot.curve) {
      if (!visible_x(x) || !visible_y(y)) continue;
      d += (d.empty() ? "M" : " L") + px(x) + " " + py(y);
    }
    if (!d.empty()) s += "<path d=\"" + d + "\" stroke=\"#c0392b\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }

  s += "<g stroke=\"#1f4e79\" fill=\"#1f4e79\">\n";
  for (const auto& p : plot.points) {
    if (!visible_x(p.x) || !visible_y(p.y)) continue;
    if (p.hi > p.lo && visible_y(p.lo))
      s += "<line x1=\"" + px(p.x) + "\" y1=\"" + py(p.lo) + "\" x2=\"" + px(p.x) + "\" y2=\"" + py(p.hi) + "\"/>";
    s += "<circle cx=\"" + px(p.x) + "\" cy=\"" + py(p.y) + "\" r=\"3\"/>\n";
  }
  s += "</g>\n";
  if (!plot.annotation.empty())
    s += "<text x=\"610\" y=\"58\" text-anchor=\"end\" fill=\"#c0392b\">" + detail::xml_escape(plot.annotation) +
         "</text>\n";
  s += "</svg>\n";
  return s;
}

/// Builds the plot for a preset from a parsed CSV.
inline Plot build_plot(const CsvTable& t, const PlotSpec& spec) {
  if (t.rows.empty()) throw DomainError("CSV has no data rows");
  Plot plot;
  plot.title = spec.title;
  auto num = [&](std::size_t r, std::string_view col) { return csv_real(t.cell(r, col)); };

  if (spec.preset == "deviation") {
    t.require_columns({"n", "quantile", "value", "ci_lo", "ci_hi"});
    plot.x_label = "n";
    plot.y_label = "max deviation, quantile " + format_real(spec.quantile);
    plot.log_x = spec.log_x.value_or(true);
    plot.log_y = spec.log_y.value_or(true);
    std::vector<double> lx, ly;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (num(r, "quantile") != spec.quantile) continue;
      const PlotPoint p{num(r, "n"), num(r, "value"), num(r, "ci_lo"), num(r, "ci_hi")};
      plot.points.push_back(p);
      if (p.x > 0 && p.y > 0) {
        lx.push_back(std::log(p.x));
        ly.push_back(std::log(p.y));
      }
    }
    if (plot.points.empty()) throw DomainError("no rows at quantile " + format_real(spec.quantile));
    if (lx.size() >= 2 && plot.log_x && plot.log_y) {
      try {
        const auto fit = stats::fit_line(lx, ly);
        const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
        for (double v : {*mn, *mx}) plot.curve.emplace_back(std::exp(v), std::exp(fit.intercept + fit.slope * v));
        plot.annotation = "slope = " + detail::fmt("%.3f", fit.slope);
      } catch (const FitError&) {
      }
    }
  } else if (spec.preset == "convergence" || spec.preset == "shape") {
    const bool conv = spec.preset == "convergence";
    t.require_columns({"n", "q_or_p_or_xy", "mean", "stderr"});
    plot.x_label = conv ? "n" : "direction parameter";
    plot.y_label = conv ? "E T(n,n) / n" : "normalized passage time";
    plot.log_x = spec.log_x.value_or(false);
    plot.log_y = spec.log_y.value_or(false);
    std::vector<double> ax, ay;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double x = conv ? num(r, "n") : num(r, "q_or_p_or_xy");
      const double y = num(r, "mean");
      const double e = 1.96 * num(r, "stderr");
      plot.points.push_back({x, y, y - e, y + e});
      if (conv && x > 1) {
        ax.push_back(convergence_abscissa(static_cast<int>(x)));
        ay.push_back(y);
      }
    }
    if (conv && ax.size() >= 2) {
      try {
        const auto fit = stats::fit_line(ax, ay);
        double lo = plot.points.front().x, hi = lo;
        for (const auto& p : plot.points) {
          lo = std::min(lo, p.x);
          hi = std::max(hi, p.x);
        }
        lo = std::max(lo, 2.0);
        constexpr int kSteps = 64;
        for (int i = 0; i <= kSteps; ++i) {
          const double n = lo + (hi - lo) * i / kSteps;
          plot.curve.emplace_back(n, fit.intercept + fit.slope * std::sqrt(std::log(n) / n));
        }
        plot.annotation = "a = " + detail::fmt("%.4f", fit.intercept) + ", b = " + detail::fmt("%.4f", -fit.slope);
      } catch (const FitError&) {
      }
    }
  } else if (spec.preset == "event-a" || spec.preset == "containment") {
    const bool ev = spec.preset == "event-a";
    const std::string_view xcol = ev ? "n" : "width";
    t.require_columns({xcol, "p_hat", "stderr"});
    plot.x_label = std::string(xcol);
    plot.y_label = ev ? "P(event A)" : "P(contained)";
    plot.log_x = spec.log_x.value_or(ev);
    plot.log_y = spec.log_y.value_or(false);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double y = num(r, "p_hat");
      const double e = 1.96 * num(r, "stderr");
      plot.points.push_back({num(r, xcol), y, y - e, y + e});
    }
  } else if (spec.preset == "xy") {
    if (spec.x.empty() || spec.y.empty()) throw DomainError("xy preset needs x= and y= columns");
    t.require_columns({spec.x, spec.y});
    if (!spec.err.empty()) t.require_columns({spec.err});
    plot.x_label = spec.x;
    plot.y_label = spec.y;
    plot.log_x = spec.log_x.value_or(false);
    plot.log_y = spec.log_y.value_or(false);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double y = num(r, spec.y);
      const double e = spec.err.empty() ? 0.0 : num(r, spec.err);
      plot.points.push_back({num(r, spec.x), y, y - e, y + e});
    }
  } else {
    throw DomainError("unknown plot preset '" + spec.preset + "'");
  }
  return plot;
}

/// Reads the CSV, renders, and writes the SVG (to spec.output, or next to the
/// CSV with an .svg extension). Nothing is written when any step fails.
inline std::string emit_plot(const std::string& csv_path, const PlotSpec& spec) {
  const auto text = read_file(csv_path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw DomainError("empty CSV: " + csv_path);
  const auto svg = render_svg(build_plot(parse_csv(text), spec));
  std::string out = spec.output;
  if (out.empty()) out = std::filesystem::path(csv_path).replace_extension(".svg").string();
  write_file(out, svg);
  return out;
}

}  // namespace glab
