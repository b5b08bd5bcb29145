#include "reskern/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace reskern {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 64, kRight = 24, kTop = 40, kBottom = 56;

std::string num(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << v;
  return out.str();
}

struct PlotPoint {
  int index;
  double mean, sd;
};

}  // namespace

void write_sweep_svg(const SweepResult& sweep, const std::string& metric,
                     const std::string& path) {
  if (metric != "nmi" && metric != "acc")
    throw config_error("unknown sweep metric '" + metric + "'");
  const bool use_nmi = metric == "nmi";

  std::vector<PlotPoint> points;
  std::string dataset;
  for (const SweepPoint& point : sweep.points) {
    if (dataset.empty()) dataset = point.result.dataset_name;
    if (point.failed()) continue;
    const MetricsReport rep = point.result.report();
    points.push_back({point.index, use_nmi ? rep.nmi_mean() : rep.acc_mean(),
                      use_nmi ? rep.nmi_sd() : rep.acc_sd()});
  }

  double lo = 1.0, hi = 0.0;
  for (const PlotPoint& p : points) {
    lo = std::min(lo, p.mean - p.sd);
    hi = std::max(hi, p.mean + p.sd);
  }
  if (points.empty()) {
    lo = 0.0;
    hi = 1.0;
  }
  lo = std::max(0.0, lo - 0.05);
  hi = std::min(1.0, hi + 0.05);
  if (hi - lo < 0.1) {  // keep the axis readable on flat curves
    const double mid = (lo + hi) / 2.0;
    lo = std::max(0.0, mid - 0.05);
    hi = std::min(1.0, mid + 0.05);
  }

  const int n = static_cast<int>(sweep.spec.grid.size());
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto x_of = [&](int index) {
    return n == 1 ? kLeft + plot_w / 2
                  : kLeft + plot_w * (index - 1) / static_cast<double>(n - 1);
  };
  const auto y_of = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << dataset << " — "
      << (use_nmi ? "NMI" : "ACC") << " vs " << sweep_parameter_name(sweep.spec.parameter)
      << " (index)</text>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    const double y = y_of(v);
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft
        << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v)
        << "</text>\n";
  }
  for (int index = 1; index <= n; ++index) {
    const double x = x_of(index);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << num(x)
        << "\" y2=\"" << kTop + plot_h + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << index
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << sweep_parameter_name(sweep.spec.parameter) << " index</text>\n";

  if (points.empty()) {
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "fill=\"#888\">no successful grid points</text>\n";
  }

  // whiskers
  for (const PlotPoint& p : points) {
    const double x = x_of(p.index);
    const double y1 = y_of(std::min(hi, p.mean + p.sd));
    const double y2 = y_of(std::max(lo, p.mean - p.sd));
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(y2) << "\" stroke=\"#4477aa\" stroke-width=\"1\"/>\n";
  }
  // line segments only between consecutive grid indices, so failures show as gaps
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].index != points[i - 1].index + 1) continue;
    out << "<line x1=\"" << num(x_of(points[i - 1].index)) << "\" y1=\""
        << num(y_of(points[i - 1].mean)) << "\" x2=\"" << num(x_of(points[i].index))
        << "\" y2=\"" << num(y_of(points[i].mean))
        << "\" stroke=\"#4477aa\" stroke-width=\"2\"/>\n";
  }
  for (const PlotPoint& p : points) {
    out << "<circle cx=\"" << num(x_of(p.index)) << "\" cy=\"" << num(y_of(p.mean))
        << "\" r=\"3.5\" fill=\"#4477aa\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace reskern
