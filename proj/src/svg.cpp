#include "ppnn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ppnn/errors.hpp"

namespace ppnn {

namespace {

constexpr double kW = 900, kH = 560;
constexpr double kL = 80, kR = 30, kT = 50, kB = 60;  // margins

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
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

}  // namespace

std::string render_epsilon_chart(const std::vector<RolloutReport>& reports,
                                 const std::string& title) {
  if (reports.empty()) throw ConfigError("render_epsilon_chart: nothing to plot");

  int max_step = 0;
  double lo = 1e300, hi = -1e300;
  for (const RolloutReport& r : reports) {
    max_step = std::max(max_step, static_cast<int>(r.stats.size()));
    for (const StepStats& st : r.stats) {
      if (st.n_alive > 0 && std::isfinite(st.mean) && st.mean > 0.0) {
        lo = std::min(lo, st.mean);
        hi = std::max(hi, st.mean);
      }
    }
  }
  if (!(hi >= lo)) {  // all-zero or empty curves: pin a harmless range
    lo = 1e-6;
    hi = 1.0;
  }
  double ylo = std::floor(std::log10(std::max(lo, 1e-300)));
  double yhi = std::ceil(std::log10(hi));
  if (yhi <= ylo) yhi = ylo + 1.0;

  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto sx = [&](double step) { return kL + pw * (step / std::max(1, max_step)); };
  auto sy = [&](double v) {
    const double t = (std::log10(std::max(v, 1e-300)) - ylo) / (yhi - ylo);
    return kT + ph * (1.0 - std::clamp(t, 0.0, 1.0));
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW
     << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << xml_escape(title) << "</text>\n";

  // frame
  os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\""
     << ph << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // y decades
  for (double d = ylo; d <= yhi + 1e-9; d += 1.0) {
    const double y = sy(std::pow(10.0, d));
    os << "<line x1=\"" << kL << "\" y1=\"" << fmt(y) << "\" x2=\"" << kL + pw
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << kL - 8 << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e"
       << static_cast<int>(d) << "</text>\n";
  }
  // x ticks (5)
  for (int i = 0; i <= 5; ++i) {
    const double step = max_step * i / 5.0;
    const double x = sx(step);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << kT + ph << "\" x2=\"" << fmt(x)
       << "\" y2=\"" << kT + ph + 5 << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << kT + ph + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << fmt(step) << "</text>\n";
  }
  os << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        "rollout step</text>\n";
  os << "<text x=\"20\" y=\"" << kT + ph / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        "transform=\"rotate(-90 20 "
     << kT + ph / 2 << ")\">relative error</text>\n";

  // training-horizon marker
  const int horizon = reports.front().horizon;
  if (horizon > 0 && horizon <= max_step) {
    const double x = sx(horizon);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << kT << "\" x2=\"" << fmt(x)
       << "\" y2=\"" << kT + ph
       << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << fmt(x + 4) << "\" y=\"" << kT + 16
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">"
          "training horizon</text>\n";
  }

  // curves
  for (std::size_t m = 0; m < reports.size(); ++m) {
    const RolloutReport& r = reports[m];
    const char* color = kPalette[m % (sizeof kPalette / sizeof kPalette[0])];
    std::ostringstream path;
    bool pen_down = false;
    for (std::size_t i = 0; i < r.stats.size(); ++i) {
      const StepStats& st = r.stats[i];
      if (st.n_alive <= 0 || !std::isfinite(st.mean) || st.mean <= 0.0) {
        pen_down = false;  // the curve stops where trajectories diverge
        continue;
      }
      path << (pen_down ? " L " : " M ") << fmt(sx(static_cast<double>(i + 1)))
           << ' ' << fmt(sy(st.mean));
      pen_down = true;
    }
    const std::string d = path.str();
    if (!d.empty()) {
      os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"2\"/>\n";
    }
    // legend entry
    const double ly = kT + 14 + 18 * static_cast<double>(m);
    os << "<line x1=\"" << kL + pw - 150 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
       << kL + pw - 120 << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kL + pw - 114 << "\" y=\"" << fmt(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(r.label)
       << "</text>\n";
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace ppnn
