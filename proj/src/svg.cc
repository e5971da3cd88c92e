/*
 * Copyright 2026 The biasaudit Authors.
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

#include "biasaudit/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace biasaudit {

namespace {

constexpr double kWidth = 760;
constexpr double kLabelWidth = 240;
constexpr double kValueMargin = 60;
constexpr double kRowHeight = 24;
constexpr double kTop = 48;
constexpr double kBottom = 36;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Phi(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.4f", v);
  return buf;
}

}  // namespace

std::string XmlEscape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string AttributionSvg(const Attribution& attribution, std::string_view title) {
  const size_t n = attribution.phi.size();
  const double height = kTop + kBottom + kRowHeight * static_cast<double>(std::max<size_t>(n, 1));
  double max_abs = 0.0;
  for (double p : attribution.phi) max_abs = std::max(max_abs, std::abs(p));
  if (max_abs == 0.0) max_abs = 1.0;

  const double plot_left = kLabelWidth + kValueMargin;
  const double plot_right = kWidth - kValueMargin;
  const double half = (plot_right - plot_left) / 2.0;
  const double zero_x = plot_left + half;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kWidth) +
         "\" height=\"" + Num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"10\" y=\"20\" font-size=\"14\">" + XmlEscape(title) + "</text>\n";
  svg += "<text x=\"10\" y=\"38\" fill=\"#555\">base " + Phi(attribution.base_value) +
         "  full " + Phi(attribution.full_value) + "  method " +
         std::string(AttributionMethodName(attribution.method)) + "</text>\n";

  for (size_t i = 0; i < n; ++i) {
    const double phi = attribution.phi[i];
    const double y = kTop + kRowHeight * static_cast<double>(i);
    const double length = std::abs(phi) / max_abs * half;
    const double x = phi < 0 ? zero_x - length : zero_x;
    const char* color = phi < 0 ? "#1f77b4" : "#d62728";
    const std::string label = i < attribution.units.size() ? attribution.units[i] : "";
    svg += "<text x=\"" + Num(kLabelWidth) + "\" y=\"" + Num(y + kRowHeight * 0.65) +
           "\" text-anchor=\"end\">" + XmlEscape(label) + "</text>\n";
    svg += "<rect x=\"" + Num(x) + "\" y=\"" + Num(y + 4) + "\" width=\"" + Num(length) +
           "\" height=\"" + Num(kRowHeight - 8) + "\" fill=\"" + color + "\"/>\n";
    const double text_x = phi < 0 ? x - 4 : x + length + 4;
    svg += "<text x=\"" + Num(text_x) + "\" y=\"" + Num(y + kRowHeight * 0.65) +
           "\" text-anchor=\"" + (phi < 0 ? "end" : "start") + "\" fill=\"#333\">" +
           Phi(phi) + "</text>\n";
  }

  const double axis_bottom = kTop + kRowHeight * static_cast<double>(std::max<size_t>(n, 1));
  svg += "<line x1=\"" + Num(zero_x) + "\" y1=\"" + Num(kTop) + "\" x2=\"" + Num(zero_x) +
         "\" y2=\"" + Num(axis_bottom) + "\" stroke=\"#000\"/>\n";
  svg += "<text x=\"" + Num(zero_x) + "\" y=\"" + Num(axis_bottom + 20) +
         "\" text-anchor=\"middle\">phi (0 at center, full width = " +
         Phi(max_abs) + ")</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace biasaudit
