/*
 * Copyright 2026 The Hotspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hotspot/svg.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace hotspot::svg {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

std::string full(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void fit(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double map(double v) const { return kTop + kPlotH * (1.0 - (v - lo) / (hi - lo)); }
};

Range y_range(const std::vector<double>& values, bool include_zero) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  if (include_zero) r.lo = r.hi = 0.0;
  for (double v : values) r.fit(v);
  if (!std::isfinite(r.lo)) r = {0.0, 1.0};
  if (r.hi - r.lo < 1e-12) r.hi = r.lo + 1.0;
  const double pad = 0.05 * (r.hi - r.lo);
  if (!include_zero || r.lo < 0.0) r.lo -= pad;
  r.hi += pad;
  return r;
}

class Doc {
 public:
  Doc(const Axes& a, const std::string& table) {
    o_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<!-- data schema_version=1\n" << comment_safe(table) << "-->\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(a.title) << "</text>\n"
       << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(a.x_label) << "</text>\n"
       << "<text transform=\"translate(16," << kTop + kPlotH / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape(a.y_label) << "</text>\n"
       << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\"" << kPlotH
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
  }
  void y_ticks(const Range& r) {
    for (int k = 0; k <= 4; ++k) {
      const double v = r.lo + (r.hi - r.lo) * k / 4.0;
      const double y = r.map(v);
      o_ << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft << "\" y1=\"" << num(y) << "\" y2=\"" << num(y) << "\" stroke=\"#444\"/>"
         << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
  }
  void x_label(double x, const std::string& text) {
    o_ << "<text x=\"" << num(x) << "\" y=\"" << kTop + kPlotH + 14 << "\" text-anchor=\"middle\">" << escape(text) << "</text>\n";
  }
  std::ostringstream& out() { return o_; }
  std::string finish() {
    o_ << "</svg>\n";
    return o_.str();
  }

 private:
  std::ostringstream o_;
};

// Labels are thinned so at most ~24 are drawn.
bool show_label(std::size_t k, std::size_t n) { return n <= 24 || k % ((n + 23) / 24) == 0; }

}  // namespace

std::string comment_safe(const std::string& text) {
  std::string o = text;
  for (std::size_t k = 0; k + 1 < o.size(); ++k) {
    if (o[k] == '-' && o[k + 1] == '-') {
      std::size_t e = k;
      while (e < o.size() && o[e] == '-') o[e++] = '.';
      k = e;
    }
  }
  return o;
}

std::string bar_chart(const Axes& axes, const std::vector<std::string>& categories,
                      const std::vector<double>& values) {
  require(categories.size() == values.size(), "one value per category");
  std::string table = "category,value\n";
  for (std::size_t k = 0; k < values.size(); ++k) table += categories[k] + "," + full(values[k]) + "\n";
  Doc d(axes, table);
  const Range r = y_range(values, true);
  d.y_ticks(r);
  const double slot = kPlotW / std::max<std::size_t>(values.size(), 1);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x = kLeft + slot * k;
    const double y0 = r.map(0.0), y1 = r.map(values[k]);
    d.out() << "<rect x=\"" << num(x + 0.1 * slot) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
            << num(0.8 * slot) << "\" height=\"" << num(std::abs(y1 - y0)) << "\" fill=\"" << kPalette[0] << "\"/>\n";
    if (show_label(k, values.size())) d.x_label(x + slot / 2, categories[k]);
  }
  return d.finish();
}

std::string line_chart(const Axes& axes, const std::vector<double>& x,
                       const std::vector<Series>& series) {
  std::string table = "series,x,y,lower,upper\n";
  std::vector<double> all;
  for (const auto& s : series) {
    require(s.y.size() == x.size(), "series length must match x");
    const bool band = !s.lower.empty();
    for (std::size_t k = 0; k < x.size(); ++k) {
      table += s.name + "," + full(x[k]) + "," + full(s.y[k]) + "," + (band ? full(s.lower[k]) : "") + "," +
               (band ? full(s.upper[k]) : "") + "\n";
      all.push_back(s.y[k]);
      if (band) {
        all.push_back(s.lower[k]);
        all.push_back(s.upper[k]);
      }
    }
  }
  Doc d(axes, table);
  const Range r = y_range(all, false);
  d.y_ticks(r);
  double xlo = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
  double xhi = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
  if (xhi - xlo < 1e-12) xhi = xlo + 1.0;
  auto mx = [&](double v) { return kLeft + 10 + (kPlotW - 20) * (v - xlo) / (xhi - xlo); };
  for (std::size_t k = 0; k < x.size(); ++k) d.x_label(mx(x[k]), num(x[k]));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % 8];
    std::string path;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!std::isfinite(series[s].y[k])) continue;
      path += (path.empty() ? "M" : " L") + num(mx(x[k])) + "," + num(r.map(series[s].y[k]));
      if (!series[s].lower.empty() && std::isfinite(series[s].lower[k])) {
        d.out() << "<line x1=\"" << num(mx(x[k])) << "\" x2=\"" << num(mx(x[k])) << "\" y1=\""
                << num(r.map(series[s].lower[k])) << "\" y2=\"" << num(r.map(series[s].upper[k]))
                << "\" stroke=\"" << colour << "\" stroke-opacity=\"0.5\"/>\n";
      }
    }
    d.out() << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"/>\n"
            << "<text x=\"" << kLeft + kPlotW + 10 << "\" y=\"" << kTop + 14 * (s + 1) << "\" fill=\"" << colour
            << "\">" << escape(series[s].name) << "</text>\n";
  }
  return d.finish();
}

std::string box_chart(const Axes& axes, const std::vector<std::string>& labels,
                      const std::vector<dynamics::BoxStats>& boxes) {
  require(labels.size() == boxes.size(), "one label per box");
  std::string table = "label,count,min,q1,median,q3,max,mean\n";
  std::vector<double> all;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const auto& b = boxes[k];
    table += labels[k] + "," + std::to_string(b.count) + "," + full(b.min) + "," + full(b.q1) + "," +
             full(b.median) + "," + full(b.q3) + "," + full(b.max) + "," + full(b.mean) + "\n";
    if (b.count) {
      all.push_back(b.min);
      all.push_back(b.max);
    }
  }
  Doc d(axes, table);
  const Range r = y_range(all, false);
  d.y_ticks(r);
  const double slot = kPlotW / std::max<std::size_t>(boxes.size(), 1);
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const double cx = kLeft + slot * (k + 0.5);
    d.x_label(cx, labels[k]);
    const auto& b = boxes[k];
    if (!b.count) continue;
    d.out() << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(r.map(b.min)) << "\" y2=\""
            << num(r.map(b.max)) << "\" stroke=\"#444\"/>\n"
            << "<rect x=\"" << num(cx - 0.3 * slot) << "\" y=\"" << num(r.map(b.q3)) << "\" width=\"" << num(0.6 * slot)
            << "\" height=\"" << num(r.map(b.q1) - r.map(b.q3)) << "\" fill=\"" << kPalette[0]
            << "\" fill-opacity=\"0.4\" stroke=\"#444\"/>\n"
            << "<line x1=\"" << num(cx - 0.3 * slot) << "\" x2=\"" << num(cx + 0.3 * slot) << "\" y1=\""
            << num(r.map(b.median)) << "\" y2=\"" << num(r.map(b.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  return d.finish();
}

std::string heatmap(const Axes& axes, const Matrix<double>& values,
                    const std::vector<std::string>& column_labels) {
  require(column_labels.size() == values.cols(), "one label per column");
  std::string table = "row";
  for (const auto& c : column_labels) table += "," + c;
  table += "\n";
  double hi = 0.0;
  for (std::size_t i = 0; i < values.rows(); ++i) {
    table += std::to_string(i);
    for (std::size_t j = 0; j < values.cols(); ++j) {
      table += "," + full(values(i, j));
      if (std::isfinite(values(i, j))) hi = std::max(hi, values(i, j));
    }
    table += "\n";
  }
  Doc d(axes, table);
  const double cw = kPlotW / std::max<std::size_t>(values.cols(), 1);
  const double ch = kPlotH / std::max<std::size_t>(values.rows(), 1);
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) {
      const double a = hi > 0.0 && std::isfinite(values(i, j)) ? values(i, j) / hi : 0.0;
      d.out() << "<rect x=\"" << num(kLeft + cw * j) << "\" y=\"" << num(kTop + ch * i) << "\" width=\"" << num(cw)
              << "\" height=\"" << num(ch) << "\" fill=\"#d62728\" fill-opacity=\"" << num(a) << "\"/>\n";
    }
  }
  for (std::size_t j = 0; j < values.cols(); ++j) {
    if (show_label(j, values.cols())) d.x_label(kLeft + cw * (j + 0.5), column_labels[j]);
  }
  return d.finish();
}

}  // namespace hotspot::svg
