#pragma once

// Local Outlier Factor of a query point against a fixed reference set.
//
//   k-distance(o)      distance from o to its k-th nearest other reference point
//   N_k(o)             every other reference point within k-distance(o) (ties included)
//   reach-dist(p, o)   max(k-distance(o), d(p, o))
//   lrd(p)             |N_k(p)| / sum_{o in N_k(p)} reach-dist(p, o)
//   LOF(p)             mean_{o in N_k(p)} lrd(o) / lrd(p)
//
// The query's own neighbourhood is taken from the reference points only.
//
// Duplicates: when every reach distance of a point is zero its lrd is +inf.
// A query whose own lrd is +inf (it sits on >= k exact duplicates) scores 1.
// A query with finite lrd next to a neighbour of infinite lrd scores
// kSaturatedLofScore, the largest finite double.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shoplift/distance.hpp"
#include "shoplift/errors.hpp"

namespace shoplift {

inline constexpr double kSaturatedLofScore = std::numeric_limits<double>::max();

class LofReference {
 public:
  LofReference() = default;

  // distances is a row-major n x n symmetric matrix; the diagonal is ignored.
  static LofReference from_distances(std::span<const double> distances, std::size_t n, std::size_t k) {
    require_size(n, k);
    LofReference ref;
    ref.k_ = k;
    ref.k_distance_.resize(n);
    ref.lrd_.resize(n);

    std::vector<double> row;
    row.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      row.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          row.push_back(distances[i * n + j]);
        }
      }
      std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
      ref.k_distance_[i] = row[k - 1];
    }

    for (std::size_t i = 0; i < n; ++i) {
      double reach_sum = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = distances[i * n + j];
        if (j != i && d <= ref.k_distance_[i]) {
          reach_sum += std::max(ref.k_distance_[j], d);
          ++count;
        }
      }
      ref.lrd_[i] = density(count, reach_sum);
    }
    return ref;
  }

  template <class Point>
  static LofReference fit(std::span<const Point> reference, std::size_t k) {
    const std::size_t n = reference.size();
    require_size(n, k);
    std::vector<double> distances(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = euclidean(reference[i], reference[j]);
        distances[i * n + j] = d;
        distances[j * n + i] = d;
      }
    }
    return from_distances(distances, n, k);
  }

  // query_distances[j] is the distance from the query to reference point j.
  double score(std::span<const double> query_distances) const {
    const std::size_t n = size();
    if (query_distances.size() != n) {
      throw InsufficientDataError("LOF query has " + std::to_string(query_distances.size()) +
                                  " distances for a reference of " + std::to_string(n));
    }
    std::vector<double> sorted(query_distances.begin(), query_distances.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_ - 1), sorted.end());
    const double k_distance = sorted[k_ - 1];

    double reach_sum = 0.0;
    double neighbor_lrd_sum = 0.0;
    std::size_t count = 0;
    bool infinite_neighbor = false;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = query_distances[j];
      if (d <= k_distance) {
        reach_sum += std::max(k_distance_[j], d);
        if (lrd_[j] == kInfinite) {
          infinite_neighbor = true;
        } else {
          neighbor_lrd_sum += lrd_[j];
        }
        ++count;
      }
    }
    const double query_lrd = density(count, reach_sum);
    if (query_lrd == kInfinite) {
      // Zero reach distances force every neighbour onto the query with zero
      // k-distance, so all neighbour densities are infinite too.
      return 1.0;
    }
    if (infinite_neighbor) {
      return kSaturatedLofScore;
    }
    return neighbor_lrd_sum / static_cast<double>(count) / query_lrd;
  }

  std::size_t size() const { return k_distance_.size(); }
  std::size_t k() const { return k_; }
  std::span<const double> k_distances() const { return k_distance_; }
  std::span<const double> local_reachability_densities() const { return lrd_; }

 private:
  static constexpr double kInfinite = std::numeric_limits<double>::infinity();

  static void require_size(std::size_t n, std::size_t k) {
    if (k < 1) {
      throw InsufficientDataError("LOF neighbor count must be >= 1");
    }
    if (n < k + 1) {
      throw InsufficientDataError("LOF needs at least k + 1 = " + std::to_string(k + 1) +
                                  " reference points, got " + std::to_string(n));
    }
  }

  static double density(std::size_t count, double reach_sum) {
    return reach_sum > 0.0 ? static_cast<double>(count) / reach_sum : kInfinite;
  }

  std::size_t k_ = 0;
  std::vector<double> k_distance_;
  std::vector<double> lrd_;
};

template <class Point>
double lof_score(std::span<const Point> reference, std::size_t k, const Point& query) {
  const LofReference ref = LofReference::fit(reference, k);
  std::vector<double> distances;
  distances.reserve(reference.size());
  for (const auto& p : reference) {
    distances.push_back(euclidean(query, p));
  }
  return ref.score(distances);
}

}  // namespace shoplift
