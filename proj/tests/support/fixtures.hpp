#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace shoplift::testing {

// 20 points inside the unit ball at the origin (Fibonacci-sphere directions,
// radii 0.045..0.9), embedded in `dim` dimensions.
inline std::vector<std::vector<double>> unit_ball_cluster(std::size_t dim) {
  std::vector<std::vector<double>> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < 20; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / 20.0;
    const double rho = std::sqrt(1.0 - z * z);
    const double radius = 0.045 * (i + 1);
    std::vector<double> p(dim, 0.0);
    p[0] = radius * rho * std::cos(golden * i);
    p[1] = radius * rho * std::sin(golden * i);
    p[2] = radius * z;
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace shoplift::testing
