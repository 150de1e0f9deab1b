#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "plgame/experiment.hpp"
#include "plgame/io.hpp"

namespace plgame {

namespace fs = std::filesystem;

namespace {

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool markers = false;  // draw circles instead of a polyline
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
  std::string annotation;
};

std::string fmt(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

/// Standalone SVG line chart. Points that cannot be shown on a log axis
/// (non-positive values) are dropped, splitting the polyline.
std::string render_svg(const Chart& chart) {
  constexpr double W = 720, H = 440, left = 80, right = 180, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return chart.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!chart.log_x || x > 0) &&
           (!chart.log_y || y > 0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : chart.series) {
    for (auto [x, y] : s.points) {
      if (!usable(x, y)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (chart.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (ty(y) - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
     << escape_xml(chart.title) << "</text>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks: decades on log axes, five even steps otherwise.
  auto ticks = [](double lo, double hi, bool log_axis) {
    std::vector<double> out;
    if (log_axis) {
      for (double e = std::ceil(lo); e <= hi + 1e-9; e += std::max(1.0, std::floor((hi - lo) / 8)))
        out.push_back(e);
    } else {
      for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
    }
    return out;
  };
  for (double t : ticks(y0, y1, chart.log_y)) {
    const double y = top + ph - (t - y0) / (y1 - y0) * ph;
    os << "<line x1=\"" << left - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << left << "\" y2=\""
       << fmt(y) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << left - 8 << "\" y=\"" << fmt(y + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
       << (chart.log_y ? "1e" + fmt(t, 0) : fmt(t, 3)) << "</text>\n";
  }
  for (double t : ticks(x0, x1, chart.log_x)) {
    const double x = left + (t - x0) / (x1 - x0) * pw;
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << top + ph << "\" x2=\"" << fmt(x) << "\" y2=\""
       << top + ph + 4 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << fmt(x) << "\" y=\"" << top + ph + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
       << (chart.log_x ? "1e" + fmt(t, 1) : fmt(t, 1)) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 16
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
     << escape_xml(chart.x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << top + ph / 2
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">" << escape_xml(chart.y_label) << "</text>\n";

  double legend_y = top + 10;
  for (const Series& s : chart.series) {
    if (s.markers) {
      for (auto [x, y] : s.points) {
        if (!usable(x, y)) continue;
        os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"4\" fill=\""
           << s.color << "\"/>\n";
      }
    } else {
      std::string pts;
      auto flush = [&] {
        if (!pts.empty()) {
          os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
             << pts << "\"/>\n";
        }
        pts.clear();
      };
      for (auto [x, y] : s.points) {
        if (!usable(x, y)) {
          flush();
          continue;
        }
        if (!pts.empty()) pts += ' ';
        pts += fmt(px(x)) + "," + fmt(py(y));
      }
      flush();
    }
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << legend_y << "\" x2=\""
       << left + pw + 32 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
       << "\" stroke-width=\"3\"/>\n"
       << "<text x=\"" << left + pw + 38 << "\" y=\"" << legend_y + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.name) << "</text>\n";
    legend_y += 18;
  }
  if (!chart.annotation.empty()) {
    os << "<text x=\"" << left + pw + 12 << "\" y=\"" << legend_y + 10
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(chart.annotation)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<fs::path> plot_trace(const fs::path& dir) {
  const auto rows = io::read_trace_csv(dir / "trace.csv");
  std::ostringstream csv;
  csv << "t,grad_theta_norm,grad_alpha_norm,g_gap,danskin_gap\n";
  Chart chart{"Stationarity trace", "outer iteration t", "value (log scale)", false, true, {}, {}};
  Series gt{"||grad_theta f||", "#1f77b4", {}};
  Series ga{"||grad_alpha f||", "#d62728", {}};
  Series gg{"g gap", "#2ca02c", {}};
  Series dg{"Danskin gap", "#9467bd", {}};
  for (const auto& r : rows) {
    const double t = static_cast<double>(r.t);
    csv << r.t << ',' << io::format_double(r.grad_theta_norm) << ','
        << io::format_double(r.grad_alpha_norm) << ','
        << (r.g_gap ? io::format_double(*r.g_gap) : "") << ','
        << (r.danskin_gap ? io::format_double(*r.danskin_gap) : "") << '\n';
    gt.points.emplace_back(t, r.grad_theta_norm);
    ga.points.emplace_back(t, r.grad_alpha_norm);
    if (r.g_gap) gg.points.emplace_back(t, *r.g_gap);
    if (r.danskin_gap) dg.points.emplace_back(t, *r.danskin_gap);
  }
  chart.series = {gt, ga};
  if (!gg.points.empty()) chart.series.push_back(gg);
  if (!dg.points.empty()) chart.series.push_back(dg);
  io::write_file(dir / "plot_trace.csv", csv.str());
  io::write_file(dir / "plot_trace.svg", render_svg(chart));
  return {dir / "plot_trace.csv", dir / "plot_trace.svg"};
}

std::vector<fs::path> plot_sweep(const fs::path& dir) {
  std::ifstream in(dir / "sweep.csv");
  if (!in) throw IoError("cannot open " + (dir / "sweep.csv").string());
  std::string line;
  const std::string header =
      "epsilon,first_hit_outer_iters,total_inner_grad_evals,total_outer_grad_evals,"
      "wall_nanoseconds,converged";
  if (!std::getline(in, line) || line != header) throw ParseError("bad sweep.csv header", 1);

  Series hits{"first-hit outer iterations", "#1f77b4", {}, true};
  std::vector<double> xs, ys;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = io::split(line);
    if (f.size() != 6) throw ParseError("expected 6 fields", lineno);
    const double eps = io::parse_double(f[0], lineno);
    const auto hit = io::parse_int(f[1], lineno);
    if (f[5] != "true" && f[5] != "false") throw ParseError("converged must be true/false", lineno);
    if (f[5] == "true" && hit > 0) {
      hits.points.emplace_back(1.0 / eps, static_cast<double>(hit));
      xs.push_back(std::log(1.0 / eps));
      ys.push_back(std::log(static_cast<double>(hit)));
    }
  }
  if (lineno == 1) throw ParseError("sweep has a header but no rows", lineno);

  Chart chart{"Epsilon sweep", "1 / epsilon", "first-hit outer iterations", true, true, {hits}, {}};
  std::ostringstream csv;
  csv << "inv_epsilon,first_hit_outer_iters,fitted\n";
  if (xs.size() >= 2) {
    const double slope = fit_slope(xs, ys);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    Series fit{"least-squares fit", "#ff7f0e", {}};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double fitted = std::exp(my + slope * (xs[i] - mx));
      fit.points.emplace_back(std::exp(xs[i]), fitted);
      csv << io::format_double(std::exp(xs[i])) << ',' << io::format_double(std::exp(ys[i])) << ','
          << io::format_double(fitted) << '\n';
    }
    std::sort(fit.points.begin(), fit.points.end());
    chart.series.push_back(fit);
    chart.annotation = "slope = " + fmt(slope, 3);
  }
  io::write_file(dir / "plot_sweep.csv", csv.str());
  io::write_file(dir / "plot_sweep.svg", render_svg(chart));
  return {dir / "plot_sweep.csv", dir / "plot_sweep.svg"};
}

}  // namespace

std::vector<fs::path> emit_plot_data(const fs::path& dir) {
  std::vector<fs::path> written;
  const bool has_trace = fs::exists(dir / "trace.csv");
  const bool has_sweep = fs::exists(dir / "sweep.csv");
  if (!has_trace && !has_sweep) {
    throw IoError(dir.string() + " holds neither trace.csv nor sweep.csv");
  }
  if (has_trace) {
    auto f = plot_trace(dir);
    written.insert(written.end(), f.begin(), f.end());
  }
  if (has_sweep) {
    auto f = plot_sweep(dir);
    written.insert(written.end(), f.begin(), f.end());
  }
  return written;
}

}  // namespace plgame
