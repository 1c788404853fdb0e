#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "csvortex/cli_io.hpp"

namespace csvortex {

namespace {

// Perceptually ordered dark-to-light ramp.
constexpr std::array<std::array<double, 3>, 5> kRamp{{
    {68, 1, 84},
    {59, 82, 139},
    {33, 145, 140},
    {94, 201, 98},
    {253, 231, 37},
}};

std::array<int, 3> colour(double t) {
  t = std::clamp(t, 0.0, 1.0) * (kRamp.size() - 1);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), kRamp.size() - 2);
  const double f = t - k;
  std::array<int, 3> c{};
  for (int i = 0; i < 3; ++i) c[i] = static_cast<int>(std::lround(kRamp[k][i] * (1 - f) + kRamp[k + 1][i] * f));
  return c;
}

}  // namespace

void write_heatmap_svg(const ScalarGrid& g, const std::string& title, std::ostream& out) {
  const int m = g.size();
  const int factor = std::max(1, (m + 127) / 128);
  const int cells = (m + factor - 1) / factor;
  std::vector<double> block(static_cast<std::size_t>(cells) * cells, 0.0);
  for (int bj = 0; bj < cells; ++bj)
    for (int bi = 0; bi < cells; ++bi) {
      double sum = 0.0;
      int count = 0;
      for (int j = bj * factor; j < std::min(m, (bj + 1) * factor); ++j)
        for (int i = bi * factor; i < std::min(m, (bi + 1) * factor); ++i) {
          sum += g(i, j);
          ++count;
        }
      block[static_cast<std::size_t>(bj) * cells + bi] = sum / count;
    }
  const auto [lo_it, hi_it] = std::minmax_element(block.begin(), block.end());
  const double lo = *lo_it, hi = *hi_it, span = hi > lo ? hi - lo : 1.0;

  const int px = 4, size = cells * px, bar = 16, margin = 40;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" shape-rendering=\"crispEdges\">\n",
                size + 3 * margin + bar, size + 2 * margin);
  out << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"14\">%s</text>\n",
                margin, margin - 12, title.c_str());
  out << buf;
  // Row j = 0 is y = -L, drawn at the bottom.
  for (int bj = 0; bj < cells; ++bj)
    for (int bi = 0; bi < cells; ++bi) {
      const auto c = colour((block[static_cast<std::size_t>(bj) * cells + bi] - lo) / span);
      std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\"/>\n",
                    margin + bi * px, margin + (cells - 1 - bj) * px, px, px, c[0], c[1], c[2]);
      out << buf;
    }
  const int bx = margin * 2 + size;
  for (int k = 0; k < size; ++k) {
    const auto c = colour(1.0 - static_cast<double>(k) / (size - 1));
    std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"1\" fill=\"rgb(%d,%d,%d)\"/>\n", bx,
                  margin + k, bar, c[0], c[1], c[2]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n"
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n",
                bx, margin - 4, hi, bx, margin + size + 14, lo);
  out << buf;
  out << "</svg>\n";
}

}  // namespace csvortex
