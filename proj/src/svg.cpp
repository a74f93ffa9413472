#include "aedmd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace aedmd {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

} // namespace

std::string render_complex_scatter(const std::string& title, const std::vector<ScatterSeries>& series,
                                   const std::vector<std::complex<double>>& reference) {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  auto extend = [&](std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  };
  for (const auto& s : series)
    for (auto z : s.points) extend(z);
  for (auto z : reference) extend(z);
  const double padx = std::max(0.5, 0.08 * (xmax - xmin));
  const double pady = std::max(0.5, 0.08 * (ymax - ymin));
  xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

  auto sx = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin); };
  auto sy = [&](double y) { return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" << escape(title) << "</text>\n";
  // frame and axes through the origin
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n";
  svg << "<line x1=\"" << num(sx(xmin)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(xmax))
      << "\" y2=\"" << num(sy(0)) << "\" stroke=\"#bbb\"/>\n";
  svg << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(ymin)) << "\" x2=\"" << num(sx(0))
      << "\" y2=\"" << num(sy(ymax)) << "\" stroke=\"#bbb\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Re</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Im</text>\n";
  for (double x : {xmin, xmax})
    svg << "<text x=\"" << num(sx(x)) << "\" y=\"" << kHeight - kMargin + 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(x) << "</text>\n";
  for (double y : {ymin, ymax})
    svg << "<text x=\"" << kMargin - 4 << "\" y=\"" << num(sy(y))
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(y) << "</text>\n";

  for (auto z : reference) {
    const double x = sx(z.real()), y = sy(z.imag());
    svg << "<path d=\"M" << num(x - 5) << ' ' << num(y - 5) << " L" << num(x + 5) << ' ' << num(y + 5)
        << " M" << num(x - 5) << ' ' << num(y + 5) << " L" << num(x + 5) << ' ' << num(y - 5)
        << "\" stroke=\"#444\" stroke-width=\"1.2\"/>\n";
  }
  double legend_y = kMargin + 14;
  for (const auto& s : series) {
    for (auto z : s.points) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
      svg << "<circle cx=\"" << num(sx(z.real())) << "\" cy=\"" << num(sy(z.imag()))
          << "\" r=\"4\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n";
    }
    svg << "<circle cx=\"" << kWidth - kMargin - 110 << "\" cy=\"" << legend_y << "\" r=\"4\" fill=\"none\" stroke=\""
        << s.color << "\" stroke-width=\"1.5\"/>";
    svg << "<text x=\"" << kWidth - kMargin - 100 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    legend_y += 16;
  }
  if (!reference.empty())
    svg << "<text x=\"" << kWidth - kMargin - 110 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">x lattice</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

} // namespace aedmd
