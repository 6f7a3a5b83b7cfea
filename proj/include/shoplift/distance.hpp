#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <ranges>

namespace shoplift {

template <std::ranges::random_access_range A, std::ranges::random_access_range B>
double squared_euclidean(const A& a, const B& b) {
  const auto n = std::ranges::size(a);
  assert(n == std::ranges::size(b));
  auto ai = std::ranges::begin(a);
  auto bi = std::ranges::begin(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(ai[i]) - static_cast<double>(bi[i]);
    sum += d * d;
  }
  return sum;
}

template <std::ranges::random_access_range A, std::ranges::random_access_range B>
double euclidean(const A& a, const B& b) {
  return std::sqrt(squared_euclidean(a, b));
}

}  // namespace shoplift
