#include "gn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace gn {

namespace {

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#b5179e",
                          "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Ticks {
  std::vector<double> values;
};

Ticks linear_ticks(double lo, double hi, int target = 6) {
  Ticks t;
  if (!(hi > lo)) {
    t.values = {lo};
    return t;
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  const double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 0.5 * step; v += step) t.values.push_back(v);
  return t;
}

Ticks log_ticks(double lo_exp, double hi_exp) {
  Ticks t;
  const int a = static_cast<int>(std::ceil(lo_exp - 1e-9));
  const int b = static_cast<int>(std::floor(hi_exp + 1e-9));
  for (int e = a; e <= b; ++e) t.values.push_back(e);
  if (t.values.empty()) t.values = {lo_exp, hi_exp};
  return t;
}

} // namespace

std::string svg_line_plot(const std::vector<PlotSeriesData>& series, const LinePlotOptions& opt) {
  const int W = opt.width, H = opt.height;
  const int ml = 84, mr = 180, mt = 48, mb = 56; // margins (right holds the legend)
  const double pw = W - ml - mr, ph = H - mt - mb;

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double y = s.y[i];
      if (opt.log_y && !(y > 0.0)) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!(x_lo <= x_hi)) { // no drawable points
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = opt.log_y ? 1e-3 : 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  double ylo_t = opt.log_y ? std::log10(y_lo) : y_lo;
  double yhi_t = opt.log_y ? std::log10(y_hi) : y_hi;
  if (yhi_t - ylo_t < 1e-12) {
    ylo_t -= 0.5;
    yhi_t += 0.5;
  } else {
    const double pad = 0.04 * (yhi_t - ylo_t);
    ylo_t -= pad;
    yhi_t += pad;
  }

  auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) {
    const double yt = opt.log_y ? std::log10(y) : y;
    return mt + (yhi_t - yt) / (yhi_t - ylo_t) * ph;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"17\">"
     << xml_escape(opt.title) << "</text>\n";

  // Axes box and ticks.
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << fmt(pw) << "\" height=\""
     << fmt(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double v : linear_ticks(x_lo, x_hi).values) {
    const double x = sx(v);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(mt + ph + 5) << "\" stroke=\"#333\"/>\n"
       << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 20)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << fmt(v)
       << "</text>\n";
  }
  const Ticks yticks = opt.log_y ? log_ticks(ylo_t, yhi_t) : linear_ticks(ylo_t, yhi_t);
  for (double v : yticks.values) {
    const double y = mt + (yhi_t - v) / (yhi_t - ylo_t) * ph;
    std::string label = opt.log_y ? ("1e" + fmt(v)) : fmt(v);
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml << "\" y2=\""
       << fmt(y) << "\" stroke=\"#333\"/>\n"
       << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ml + pw) << "\" y2=\""
       << fmt(y) << "\" stroke=\"#eee\"/>\n"
       << "<text x=\"" << ml - 9 << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << label
       << "</text>\n";
  }
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << H - 14
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << xml_escape(opt.x_label) << "</text>\n"
     << "<text x=\"20\" y=\"" << fmt(mt + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 "
     << fmt(mt + ph / 2) << ")\">" << xml_escape(opt.y_label) << "</text>\n";

  // Series.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    std::ostringstream pts;
    bool pen_down = false;
    std::string path;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (opt.log_y && !(s.y[i] > 0.0)) {
        pen_down = false;
        continue;
      }
      path += pen_down ? " L " : " M ";
      path += fmt(sx(s.x[i]));
      path += ' ';
      path += fmt(sy(s.y[i]));
      pen_down = true;
    }
    if (!path.empty())
      os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.6\"/>\n";
    const double ly = mt + 16 + 20.0 * si;
    os << "<line x1=\"" << fmt(ml + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << fmt(ml + pw + 34) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << fmt(ml + pw + 40) << "\" y=\"" << fmt(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_phase_heatmap(const std::vector<HeatmapCell>& cells, const HeatmapOptions& opt) {
  std::set<double> mus, gs;
  for (const auto& c : cells) {
    mus.insert(c.mu);
    gs.insert(c.g);
  }
  const std::vector<double> mu(mus.begin(), mus.end());
  const std::vector<double> g(gs.begin(), gs.end());
  const int W = opt.width, H = opt.height;
  const int ml = 84, mr = 150, mt = 48, mb = 56;
  const double pw = W - ml - mr, ph = H - mt - mb;
  const double cw = mu.empty() ? pw : pw / mu.size();
  const double ch = g.empty() ? ph : ph / g.size();

  auto col_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(mu.begin(), mu.end(), v) - mu.begin());
  };
  auto row_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), v) - g.begin());
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"17\">"
     << xml_escape(opt.title) << "</text>\n";

  for (const auto& c : cells) {
    const char* color = (c.category >= 0) ? kPalette[c.category % kPaletteSize] : "#dddddd";
    const double x = ml + col_of(c.mu) * cw;
    // paint the g axis bottom-up
    const double y = mt + ph - (row_of(c.g) + 1) * ch;
    os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(cw)
       << "\" height=\"" << fmt(ch) << "\" fill=\"" << color
       << "\" stroke=\"white\" stroke-width=\"1\"/>\n";
  }

  // Axis labels on cell centers (thinned to at most ~12 labels per axis).
  const std::size_t mu_step = std::max<std::size_t>(1, mu.size() / 12);
  for (std::size_t i = 0; i < mu.size(); i += mu_step) {
    os << "<text x=\"" << fmt(ml + (i + 0.5) * cw) << "\" y=\"" << fmt(mt + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(mu[i])
       << "</text>\n";
  }
  const std::size_t g_step = std::max<std::size_t>(1, g.size() / 12);
  for (std::size_t i = 0; i < g.size(); i += g_step) {
    os << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(mt + ph - (i + 0.5) * ch + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(g[i])
       << "</text>\n";
  }
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << H - 14
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << xml_escape(opt.x_label) << "</text>\n"
     << "<text x=\"20\" y=\"" << fmt(mt + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 "
     << fmt(mt + ph / 2) << ")\">" << xml_escape(opt.y_label) << "</text>\n";

  for (std::size_t k = 0; k < opt.category_names.size(); ++k) {
    const double ly = mt + 16 + 22.0 * k;
    os << "<rect x=\"" << fmt(ml + pw + 12) << "\" y=\"" << fmt(ly - 10)
       << "\" width=\"14\" height=\"14\" fill=\"" << kPalette[k % kPaletteSize] << "\"/>\n"
       << "<text x=\"" << fmt(ml + pw + 32) << "\" y=\"" << fmt(ly + 2)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(opt.category_names[k])
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace gn
