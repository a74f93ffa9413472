#pragma once

#include <complex>
#include <string>
#include <vector>

namespace aedmd {

struct ScatterSeries {
  std::string label;
  std::string color;
  std::vector<std::complex<double>> points;
};

// Minimal complex-plane scatter: axes through the origin, one marker style per
// series, reference lattice points drawn as crosses.
std::string render_complex_scatter(const std::string& title, const std::vector<ScatterSeries>& series,
                                   const std::vector<std::complex<double>>& reference);

} // namespace aedmd
