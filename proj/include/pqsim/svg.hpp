// Copyright 2026 The pqsim Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pqsim/csv.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/weak_values.hpp"

// Self-contained SVG heatmap of the real part of a conditional map, with
// marching-squares contours at +level and -level overlaid so regions beyond
// the unconditional range are outlined. No plotting stack, deterministic
// bytes: colors are integer-quantized and coordinates go through the same
// 9-digit formatter as the CSVs.

namespace pqsim {

namespace detail {

struct Rgb {
  int r = 0, g = 0, b = 0;
};

// Diverging blue-white-red, x in [-1, 1].
inline Rgb diverging_color(double x) {
  x = std::clamp(x, -1.0, 1.0);
  const auto lerp = [](int a, int b, double f) {
    return static_cast<int>(std::lround(static_cast<double>(a) + f * static_cast<double>(b - a)));
  };
  const Rgb blue{33, 102, 172}, white{247, 247, 247}, red{178, 24, 43};
  if (x < 0.0) {
    const double f = x + 1.0;  // blue at -1 to white at 0
    return {lerp(blue.r, white.r, f), lerp(blue.g, white.g, f), lerp(blue.b, white.b, f)};
  }
  return {lerp(white.r, red.r, x), lerp(white.g, red.g, x), lerp(white.b, red.b, x)};
}

inline std::string hex_color(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

struct SvgPoint {
  double x = 0.0, y = 0.0;
};

struct SvgSegment {
  SvgPoint a, b;
};

// Crossing point between two cell centers for value level `lv`.
inline SvgPoint edge_point(SvgPoint pa, double va, SvgPoint pb, double vb, double lv) {
  double f = (vb == va) ? 0.5 : (lv - va) / (vb - va);
  f = std::clamp(f, 0.0, 1.0);
  return {pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y)};
}

}  // namespace detail

struct SvgOptions {
  double contour_level = 0.5;
  int margin_left = 60, margin_top = 20, margin_right = 20, margin_bottom = 45;
};

inline void write_map_svg(const std::string& path, const ConditionalMap& map,
                          const SvgOptions& opt = {}) {
  const std::size_t nrows = map.times.size();
  const std::size_t ncols = map.rabi_freqs.size();
  if (nrows < 1 || ncols < 1) throw ConfigError("write_map_svg: empty map");

  const int cw = std::max<int>(2, static_cast<int>(std::lround(800.0 / static_cast<double>(ncols))));
  const int ch = std::max<int>(2, static_cast<int>(std::lround(750.0 / static_cast<double>(nrows))));
  const int plot_w = cw * static_cast<int>(ncols);
  const int plot_h = ch * static_cast<int>(nrows);
  const int width = opt.margin_left + plot_w + opt.margin_right;
  const int height = opt.margin_top + plot_h + opt.margin_bottom;

  double vmax = opt.contour_level;
  for (std::size_t cell = 0; cell < map.values.size(); ++cell)
    if (!map.missing[cell]) vmax = std::max(vmax, std::abs(map.values[cell].real()));

  std::ofstream out = open_for_write(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  // Heatmap cells, row-major to keep emission order fixed.
  for (std::size_t ti = 0; ti < nrows; ++ti) {
    for (std::size_t ri = 0; ri < ncols; ++ri) {
      const std::size_t cell = map.index(ti, ri);
      std::string fill = "#b0b0b0";
      if (!map.missing[cell])
        fill = detail::hex_color(detail::diverging_color(map.values[cell].real() / vmax));
      const int x = opt.margin_left + static_cast<int>(ri) * cw;
      const int y = opt.margin_top + static_cast<int>(ti) * ch;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
          << "\" fill=\"" << fill << "\"/>\n";
    }
  }

  // Contours at +level and -level over the cell-center lattice.
  const auto center = [&](std::size_t ti, std::size_t ri) {
    return detail::SvgPoint{opt.margin_left + (static_cast<double>(ri) + 0.5) * cw,
                            opt.margin_top + (static_cast<double>(ti) + 0.5) * ch};
  };
  std::vector<detail::SvgSegment> segments;
  for (const double lv : {opt.contour_level, -opt.contour_level}) {
    for (std::size_t ti = 0; ti + 1 < nrows; ++ti) {
      for (std::size_t ri = 0; ri + 1 < ncols; ++ri) {
        const std::size_t c00 = map.index(ti, ri), c10 = map.index(ti, ri + 1);
        const std::size_t c01 = map.index(ti + 1, ri), c11 = map.index(ti + 1, ri + 1);
        if (map.missing[c00] || map.missing[c10] || map.missing[c01] || map.missing[c11])
          continue;
        const double v00 = map.values[c00].real(), v10 = map.values[c10].real();
        const double v01 = map.values[c01].real(), v11 = map.values[c11].real();
        const detail::SvgPoint p00 = center(ti, ri), p10 = center(ti, ri + 1);
        const detail::SvgPoint p01 = center(ti + 1, ri), p11 = center(ti + 1, ri + 1);
        int idx = 0;
        if (v00 > lv) idx |= 1;
        if (v10 > lv) idx |= 2;
        if (v11 > lv) idx |= 4;
        if (v01 > lv) idx |= 8;
        if (idx == 0 || idx == 15) continue;
        const detail::SvgPoint t = detail::edge_point(p00, v00, p10, v10, lv);
        const detail::SvgPoint r = detail::edge_point(p10, v10, p11, v11, lv);
        const detail::SvgPoint b = detail::edge_point(p01, v01, p11, v11, lv);
        const detail::SvgPoint l = detail::edge_point(p00, v00, p01, v01, lv);
        const auto add = [&segments](detail::SvgPoint a, detail::SvgPoint c) {
          segments.push_back({a, c});
        };
        switch (idx) {
          case 1: add(l, t); break;
          case 2: add(t, r); break;
          case 3: add(l, r); break;
          case 4: add(r, b); break;
          case 5:
            if (0.25 * (v00 + v10 + v01 + v11) > lv) {
              add(t, r);
              add(b, l);
            } else {
              add(l, t);
              add(r, b);
            }
            break;
          case 6: add(t, b); break;
          case 7: add(l, b); break;
          case 8: add(l, b); break;
          case 9: add(t, b); break;
          case 10:
            if (0.25 * (v00 + v10 + v01 + v11) > lv) {
              add(l, t);
              add(r, b);
            } else {
              add(t, r);
              add(b, l);
            }
            break;
          case 11: add(r, b); break;
          case 12: add(l, r); break;
          case 13: add(t, r); break;
          case 14: add(l, t); break;
          default: break;
        }
      }
    }
  }
  for (const auto& s : segments) {
    out << "<line x1=\"" << format_double(s.a.x) << "\" y1=\"" << format_double(s.a.y)
        << "\" x2=\"" << format_double(s.b.x) << "\" y2=\"" << format_double(s.b.y)
        << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  }

  // Minimal axes: corner tick labels plus axis names.
  const int x0 = opt.margin_left, x1 = opt.margin_left + plot_w;
  const int y0 = opt.margin_top, y1 = opt.margin_top + plot_h;
  out << "<text x=\"" << x0 << "\" y=\"" << y1 + 16 << "\" font-size=\"11\" font-family=\"sans-serif\">"
      << format_double(map.rabi_freqs.front()) << "</text>\n";
  out << "<text x=\"" << x1 - 24 << "\" y=\"" << y1 + 16
      << "\" font-size=\"11\" font-family=\"sans-serif\">" << format_double(map.rabi_freqs.back())
      << "</text>\n";
  out << "<text x=\"" << (x0 + x1) / 2 - 30 << "\" y=\"" << y1 + 34
      << "\" font-size=\"12\" font-family=\"sans-serif\">nu_r_mhz</text>\n";
  out << "<text x=\"" << x0 - 55 << "\" y=\"" << y0 + 10
      << "\" font-size=\"11\" font-family=\"sans-serif\">" << format_double(map.times.front())
      << "</text>\n";
  out << "<text x=\"" << x0 - 55 << "\" y=\"" << y1
      << "\" font-size=\"11\" font-family=\"sans-serif\">" << format_double(map.times.back())
      << "</text>\n";
  out << "<text x=\"" << x0 - 55 << "\" y=\"" << (y0 + y1) / 2
      << "\" font-size=\"12\" font-family=\"sans-serif\">t_us</text>\n";
  out << "</svg>\n";
  finish_write(out, path);
}

}  // namespace pqsim
