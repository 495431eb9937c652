#include "covest/experiment.hpp"
#include "covest/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace covest {

namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 200.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 30.0;

std::string num(double v) {
  return io::format_double(std::round(v * 100.0) / 100.0);
}

void panel(std::ostringstream& os, const MethodResult& res, double y0) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kPanelHeight - kTop - kBottom;
  const double x0 = kLeft;
  const double ybase = y0 + kTop + plot_h;

  os << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 + kTop - 10) << "\" font-size=\"13\">"
     << to_string(res.method) << "</text>\n";
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(ybase) << "\" x2=\"" << num(x0 + plot_w)
     << "\" y2=\"" << num(ybase) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0 + kTop) << "\" x2=\"" << num(x0)
     << "\" y2=\"" << num(ybase) << "\" stroke=\"black\"/>\n";
  const char* ticks[] = {"0", "pi/4", "pi/2", "3pi/4", "pi"};
  for (int i = 0; i <= 4; ++i) {
    const double x = x0 + plot_w * i / 4.0;
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(ybase) << "\" x2=\"" << num(x)
       << "\" y2=\"" << num(ybase + 4) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(ybase + 16)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << ticks[i] << "</text>\n";
  }

  if (res.error) {
    os << "<text x=\"" << num(x0 + 10) << "\" y=\"" << num(y0 + kTop + plot_h / 2)
       << "\" font-size=\"11\" fill=\"gray\">no spectrum</text>\n";
    return;
  }
  const auto& g = res.spectrum;
  std::vector<double> lg(g.psd.size());
  std::transform(g.psd.begin(), g.psd.end(), lg.begin(), [](double v) { return std::log10(v); });
  double lo = *std::min_element(lg.begin(), lg.end());
  double hi = *std::max_element(lg.begin(), lg.end());
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y0 + kTop + 4)
     << "\" font-size=\"10\" text-anchor=\"end\">" << num(hi) << "</text>\n";
  os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(ybase)
     << "\" font-size=\"10\" text-anchor=\"end\">" << num(lo) << "</text>\n";

  os << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i < lg.size(); ++i) {
    const double x = x0 + plot_w * g.freqs[i] / std::numbers::pi;
    const double y = ybase - plot_h * (lg[i] - lo) / (hi - lo);
    os << (i ? " " : "") << num(x) << ',' << num(y);
  }
  os << "\"/>\n";

  const double xa = x0 + plot_w / 4.0;
  os << "<line x1=\"" << num(xa) << "\" y1=\"" << num(y0 + kTop) << "\" x2=\"" << num(xa)
     << "\" y2=\"" << num(ybase - 2) << "\" stroke=\"red\" stroke-width=\"1.5\" "
     << "marker-end=\"url(#arrow)\"/>\n";
}

}  // namespace

std::string spectrum_svg(const ExperimentReport& report) {
  const std::size_t panels = std::max<std::size_t>(report.results.size(), 1);
  const double height = kPanelHeight * static_cast<double>(panels) + 30.0;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth)
     << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height)
     << "\">\n";
  os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
        "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"red\"/></marker>"
        "</defs>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft) << "\" y=\"20\" font-size=\"14\">log10 spectrum, phase "
     << report.config.label << "</text>\n";
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    panel(os, report.results[i], 30.0 + kPanelHeight * static_cast<double>(i));
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace covest
