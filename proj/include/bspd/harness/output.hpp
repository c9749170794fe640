// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bspd/harness/sweeps.hpp"

namespace bspd::harness {

inline constexpr std::string_view kCsvHeader =
    "experiment,scheme,sweep_name,sweep_value,snr_db,trials,metric_name,metric_value,base_seed";

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  if (rows.empty()) throw InvalidParameter("emit_csv: no rows to write");
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    for (const auto* f : {&r.experiment, &r.scheme, &r.sweep_name, &r.metric_name})
      if (f->find_first_of(",\n\"") != std::string::npos)
        throw InvalidParameter("emit_csv: field contains a separator: '" + *f + "'");
    out << r.experiment << ',' << r.scheme << ',' << r.sweep_name << ',' << format_double(r.sweep_value) << ','
        << format_double(r.snr_db) << ',' << r.trials << ',' << r.metric_name << ','
        << format_double(r.metric_value) << ',' << r.base_seed << '\n';
  }
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream s;
  write_csv(rows, s);
  return s.str();
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw InvalidParameter("emit_csv: no rows to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

inline std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("parse_csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest = rest.substr(c + 1);
    }
    if (f.size() != 9) throw std::runtime_error("parse_csv: line " + std::to_string(line_no) + ": expected 9 fields");
    try {
      ResultRow r;
      r.experiment = std::string(f[0]);
      r.scheme = std::string(f[1]);
      r.sweep_name = std::string(f[2]);
      r.sweep_value = detail::parse_number<double>(f[3]);
      r.snr_db = detail::parse_number<double>(f[4]);
      r.trials = detail::parse_number<std::size_t>(f[5]);
      r.metric_name = std::string(f[6]);
      r.metric_value = detail::parse_number<double>(f[7]);
      r.base_seed = detail::parse_number<std::uint64_t>(f[8]);
      rows.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("parse_csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

inline std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

// Line chart of metric_value against sweep_value, one polyline per scheme.
inline std::string render_svg(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw InvalidParameter("emit_svg: no rows to plot");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& r : rows) {
    if (!series.count(r.scheme)) order.push_back(r.scheme);
    series[r.scheme].emplace_back(r.sweep_value, r.metric_value);
    x0 = std::min(x0, r.sweep_value);
    x1 = std::max(x1, r.sweep_value);
    y0 = std::min(y0, r.metric_value);
    y1 = std::max(y1, r.metric_value);
  }
  if (x1 == x0) { x0 -= 1.0; x1 += 1.0; }
  if (y1 == y0) { y0 -= 1.0; y1 += 1.0; }
  const double w = 640, h = 420, left = 70, right = 150, top = 30, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    s << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 100) / 100) << "</text>\n";
    s << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << format_double(std::round(yv * 100) / 100) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << rows.front().sweep_name << "</text>\n";
  s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2 << ")\">"
    << rows.front().metric_name << "</text>\n";
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto pts = series[order[k]];
    std::stable_sort(pts.begin(), pts.end(), [](auto a, auto b) { return a.first < b.first; });
    const char* c = colors[k % std::size(colors)];
    s << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << sx(pts[i].first) << ',' << sy(pts[i].second);
    s << "\"/>\n";
    for (const auto& p : pts) s << "<circle cx=\"" << sx(p.first) << "\" cy=\"" << sy(p.second) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    s << "<rect x=\"" << left + pw + 12 << "\" y=\"" << ly - 9 << "\" width=\"14\" height=\"4\" fill=\"" << c << "\"/>\n";
    s << "<text x=\"" << left + pw + 32 << "\" y=\"" << ly - 3 << "\">" << order[k] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void emit_svg(const std::vector<ResultRow>& rows, const std::string& path) {
  const std::string svg = render_svg(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_svg: cannot open '" + path + "' for writing");
  out << svg;
  out.flush();
  if (!out) throw std::runtime_error("emit_svg: write failed for '" + path + "'");
}

}  // namespace bspd::harness
