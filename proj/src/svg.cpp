// Copyright 2026 The usc-lindblad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace usc::svg {

namespace {

constexpr double kW = 720, kH = 440, kL = 80, kR = 160, kT = 40, kB = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string render(const Plot& p) {
  const auto ty = [&](double y) { return p.log_y ? std::log10(y) : y; };
  const auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!p.log_y || y > 0); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : p.series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = kW - kL - kR, ph = kH - kT - kB;
  const auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return kT + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(p.title) << "</text>\n";
  o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    const double X = px(xv);
    o << "<line x1=\"" << X << "\" y1=\"" << kT + ph << "\" x2=\"" << X << "\" y2=\"" << kT + ph + 5
      << "\" stroke=\"black\"/><text x=\"" << X << "\" y=\"" << kT + ph + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
      << "</text>\n";
    const double yv = y0 + (y1 - y0) * k / 5.0;
    const double Y = kT + (1.0 - k / 5.0) * ph;
    o << "<line x1=\"" << kL - 5 << "\" y1=\"" << Y << "\" x2=\"" << kL << "\" y2=\"" << Y
      << "\" stroke=\"black\"/><text x=\"" << kL - 8 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">"
      << (p.log_y ? "1e" + fmt(yv) : fmt(yv)) << "</text>\n";
  }
  o << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">" << escape(p.x_label)
    << "</text>\n";
  o << "<text transform=\"translate(18," << kT + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(p.y_label) << "</text>\n";

  for (double v : p.vlines) {
    if (!(v >= x0 && v <= x1)) continue;
    o << "<line x1=\"" << px(v) << "\" y1=\"" << kT << "\" x2=\"" << px(v) << "\" y2=\"" << kT + ph
      << "\" stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n";
  }

  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const auto& se = p.series[s];
    const char* col = kColors[s % std::size(kColors)];
    if (se.markers) {
      for (std::size_t k = 0; k < std::min(se.x.size(), se.y.size()); ++k)
        if (usable(se.x[k], se.y[k]))
          o << "<circle cx=\"" << px(se.x[k]) << "\" cy=\"" << py(se.y[k]) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < std::min(se.x.size(), se.y.size()); ++k)
        if (usable(se.x[k], se.y[k])) o << px(se.x[k]) << "," << py(se.y[k]) << " ";
      o << "\"/>\n";
    }
    const double ly = kT + 10 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << kL + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kL + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/><text x=\"" << kL + pw + 35 << "\" y=\"" << ly + 4 << "\">"
      << escape(se.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

bool write(const std::filesystem::path& path, const Plot& p) noexcept {
  try {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) return false;
    out << render(p);
    return static_cast<bool>(out);
  } catch (...) {
    return false;
  }
}

}  // namespace usc::svg
