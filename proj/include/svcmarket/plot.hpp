#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "svcmarket/io.hpp"
#include "svcmarket/stats.hpp"

namespace svcmarket {

/// Minimal SVG charts. Output depends only on the input numbers.
namespace svg {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return palette[i % 8];
}

/// Plot frame with a y axis mapped from [lo, hi].
class Canvas {
 public:
  Canvas(std::string title, std::string ylabel, double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(hi_ > lo_)) {
      hi_ = lo_ + 1.0;
      lo_ -= 1.0;
    }
    body_ += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
             escape(title) + "</text>\n";
    body_ += "<text x=\"16\" y=\"" + fmt(kTop + plot_h() / 2) + "\" transform=\"rotate(-90 16 " +
             fmt(kTop + plot_h() / 2) + ")\" text-anchor=\"middle\" font-size=\"12\">" + escape(ylabel) +
             "</text>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = lo_ + (hi_ - lo_) * i / 4.0;
      const double y = ymap(v);
      body_ += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kWidth - kRight) + "\" y2=\"" +
               fmt(y) + "\" stroke=\"#ddd\"/>\n";
      body_ += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + fmt(v) + "</text>\n";
    }
    body_ += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
             fmt(kTop + plot_h()) + "\" stroke=\"#000\"/>\n";
    body_ += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + plot_h()) + "\" x2=\"" + fmt(kWidth - kRight) +
             "\" y2=\"" + fmt(kTop + plot_h()) + "\" stroke=\"#000\"/>\n";
  }

  static constexpr double kWidth = 800, kHeight = 480, kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
  [[nodiscard]] static double plot_w() { return kWidth - kLeft - kRight; }
  [[nodiscard]] static double plot_h() { return kHeight - kTop - kBottom; }

  [[nodiscard]] double ymap(double v) const { return kTop + plot_h() * (1.0 - (v - lo_) / (hi_ - lo_)); }

  void add(const std::string& s) { body_ += s; }

  void xlabel(double x, const std::string& text) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + plot_h() + 18) +
             "\" text-anchor=\"middle\" font-size=\"11\">" + escape(text) + "</text>\n";
  }

  [[nodiscard]] std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
           "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\" font-family=\"sans-serif\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double lo_, hi_;
  std::string body_;
};

inline std::pair<double, double> range_of(const std::vector<std::vector<double>>& groups) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& g : groups) {
    for (double x : g) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

inline double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= xs.size()) return xs.back();
  return xs[i] * (1.0 - frac) + xs[i + 1] * frac;
}

/// One box (quartiles, median, whiskers at min and max) per group.
inline std::string boxplot(const std::string& title, const std::string& ylabel,
                           const std::vector<std::string>& labels, const std::vector<std::vector<double>>& groups) {
  const auto [lo, hi] = range_of(groups);
  Canvas c(title, ylabel, lo, hi);
  const double slot = Canvas::plot_w() / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double cx = Canvas::kLeft + slot * (static_cast<double>(i) + 0.5);
    c.xlabel(cx, labels[i]);
    if (groups[i].empty()) continue;
    const auto& g = groups[i];
    const double q1 = quantile(g, 0.25), med = quantile(g, 0.5), q3 = quantile(g, 0.75);
    const double mn = *std::min_element(g.begin(), g.end()), mx = *std::max_element(g.begin(), g.end());
    const double w = slot * 0.5;
    c.add("<g class=\"box\">\n");
    c.add("<line x1=\"" + fmt(cx) + "\" y1=\"" + fmt(c.ymap(mn)) + "\" x2=\"" + fmt(cx) + "\" y2=\"" +
          fmt(c.ymap(mx)) + "\" stroke=\"#000\"/>\n");
    c.add("<rect x=\"" + fmt(cx - w / 2) + "\" y=\"" + fmt(c.ymap(q3)) + "\" width=\"" + fmt(w) + "\" height=\"" +
          fmt(std::max(0.5, c.ymap(q1) - c.ymap(q3))) + "\" fill=\"" + color(i) + "\" fill-opacity=\"0.6\" stroke=\"#000\"/>\n");
    c.add("<line x1=\"" + fmt(cx - w / 2) + "\" y1=\"" + fmt(c.ymap(med)) + "\" x2=\"" + fmt(cx + w / 2) +
          "\" y2=\"" + fmt(c.ymap(med)) + "\" stroke=\"#000\" stroke-width=\"2\"/>\n");
    c.add("</g>\n");
  }
  return c.str();
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polylines with a legend.
inline std::string lines(const std::string& title, const std::string& ylabel, const std::vector<Series>& series) {
  std::vector<std::vector<double>> ys;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  for (const auto& s : series) {
    ys.push_back(s.y);
    for (double x : s.x) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
    }
  }
  if (!std::isfinite(xlo) || !(xhi > xlo)) {
    xlo = 0.0;
    xhi = 1.0;
  }
  const auto [lo, hi] = range_of(ys);
  Canvas c(title, ylabel, lo, hi);
  const auto xmap = [&](double x) { return Canvas::kLeft + Canvas::plot_w() * (x - xlo) / (xhi - xlo); };
  for (int i = 0; i <= 4; ++i) {
    const double x = xlo + (xhi - xlo) * i / 4.0;
    c.xlabel(xmap(x), fmt(x));
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    std::string pts;
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (k) pts += ' ';
      pts += fmt(xmap(s.x[k])) + "," + fmt(c.ymap(s.y[k]));
    }
    c.add("<polyline fill=\"none\" stroke=\"" + std::string(color(i)) + "\" stroke-width=\"1.5\" points=\"" + pts +
          "\"/>\n");
    const double ly = Canvas::kTop + 14.0 * static_cast<double>(i);
    c.add("<text x=\"" + fmt(Canvas::kWidth - Canvas::kRight - 4) + "\" y=\"" + fmt(ly + 10) +
          "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + color(i) + "\">" + escape(s.name) + "</text>\n");
  }
  return c.str();
}

/// Vertical bars.
inline std::string bars(const std::string& title, const std::string& ylabel, const std::vector<std::string>& labels,
                        const std::vector<double>& values) {
  double lo = 0.0, hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Canvas c(title, ylabel, lo, hi > lo ? hi * 1.05 : lo + 1.0);
  const double slot = Canvas::plot_w() / static_cast<double>(std::max<std::size_t>(values.size(), 1));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cx = Canvas::kLeft + slot * (static_cast<double>(i) + 0.5);
    const double w = slot * 0.6;
    const double y0 = c.ymap(0.0), y1 = c.ymap(values[i]);
    c.add("<rect class=\"bar\" x=\"" + fmt(cx - w / 2) + "\" y=\"" + fmt(std::min(y0, y1)) + "\" width=\"" + fmt(w) +
          "\" height=\"" + fmt(std::abs(y0 - y1)) + "\" fill=\"" + color(i) + "\"/>\n");
    c.add("<text x=\"" + fmt(cx) + "\" y=\"" + fmt(std::min(y0, y1) - 4) + "\" text-anchor=\"middle\" font-size=\"11\">" +
          fmt(values[i]) + "</text>\n");
    c.xlabel(cx, labels[i]);
  }
  return c.str();
}

}  // namespace svg

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

/// Groups column `value` of `t` by column `key`, keeping first-seen order.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> group_by(
    const CsvTable& t, const std::string& key, const std::string& value) {
  const auto kc = t.column(key), vc = t.column(value);
  std::vector<std::string> labels;
  std::vector<std::vector<double>> groups;
  for (const auto& row : t.rows) {
    auto it = std::find(labels.begin(), labels.end(), row.at(kc));
    if (it == labels.end()) {
      labels.push_back(row.at(kc));
      groups.emplace_back();
      it = labels.end() - 1;
    }
    groups[static_cast<std::size_t>(it - labels.begin())].push_back(std::stod(row.at(vc)));
  }
  return {labels, groups};
}

inline std::vector<svg::Series> series_by(const CsvTable& t, const std::string& key, const std::string& x,
                                          const std::string& y) {
  const auto kc = t.column(key), xc = t.column(x), yc = t.column(y);
  std::vector<svg::Series> out;
  for (const auto& row : t.rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const svg::Series& s) { return s.name == row.at(kc); });
    if (it == out.end()) {
      out.push_back({row.at(kc), {}, {}});
      it = out.end() - 1;
    }
    it->x.push_back(std::stod(row.at(xc)));
    it->y.push_back(std::stod(row.at(yc)));
  }
  return out;
}

}  // namespace detail

/// Renders every chart the result files in `dir` support and returns the
/// files written. Throws MissingResults when nothing there can be plotted.
inline std::vector<std::filesystem::path> render_plots(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  const auto emit = [&](const std::string& name, const std::string& text) {
    detail::write_text(dir / name, text);
    written.push_back(dir / name);
  };

  if (fs::exists(dir / "stability.csv")) {
    const auto t = read_csv(dir / "stability.csv");
    emit("stability.svg", svg::bars("Stability of measurement methods across topologies", "stability",
                                    t.strings("method"), t.numbers("stability")));
  }
  if (fs::exists(dir / "method_table.csv")) {
    const auto t = read_csv(dir / "method_table.csv");
    emit("method_overall.svg",
         svg::bars("Overall factor score by method", "Overall", t.strings("method"), t.numbers("Overall")));
  }
  if (fs::exists(dir / "individual_utilities.csv")) {
    const auto t = read_csv(dir / "individual_utilities.csv");
    const auto [labels, groups] = detail::group_by(t, "topology", "utility");
    emit("individual_utility.svg",
         svg::boxplot("Business agent utility by topology", "U_ind", labels, groups));
  }
  if (fs::exists(dir / "org_series.csv")) {
    const auto t = read_csv(dir / "org_series.csv");
    emit("org_accumulation.svg", svg::lines("Organizational utility accumulation (mean over institutions)",
                                            "cumulative U_org", detail::series_by(t, "topology", "tick", "org_cumulative")));
  }
  if (fs::exists(dir / "system_series.csv")) {
    const auto t = read_csv(dir / "system_series.csv");
    emit("system_timeseries.svg", svg::lines("System utility per tick", "U_sys per tick",
                                             detail::series_by(t, "topology", "tick", "system_flow")));
  }
  if (fs::exists(dir / "topology_runs.csv")) {
    const auto t = read_csv(dir / "topology_runs.csv");
    const auto [labels, groups] = detail::group_by(t, "topology", "system_utility");
    emit("system_utility.svg", svg::boxplot("System utility by topology", "U_sys", labels, groups));
  }
  if (fs::exists(dir / "timeseries.csv")) {
    const auto t = read_csv(dir / "timeseries.csv");
    emit("run_timeseries.svg",
         svg::lines("System utility per tick", "U_sys per tick",
                    {svg::Series{"run", t.numbers("tick"), t.numbers("system_flow")}}));
  }
  if (written.empty()) throw MissingResults("no plottable result files in " + dir.string());
  return written;
}

}  // namespace svcmarket
