#pragma once

// k-nearest-neighbour pose classification over normalized landmark vectors.
//
// Ordering and tie rules:
//   * neighbours are ranked by (distance, sample index), so at the k-th rank
//     the lower sample index wins;
//   * the class with the most votes wins; a vote tie goes to the class with the
//     smallest mean neighbour distance, then to the lowest class index.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "shoplift/distance.hpp"
#include "shoplift/errors.hpp"
#include "shoplift/model.hpp"

namespace shoplift {

inline constexpr std::size_t kDefaultKnnK = 5;

struct Neighbor {
  double distance = 0.0;
  std::size_t index = 0;
};

// The k closest items to query. point_of projects an item to a point range.
template <class Item, class Query, class PointOf>
std::vector<Neighbor> nearest_neighbors(std::span<const Item> items, const Query& query, std::size_t k,
                                        PointOf point_of) {
  std::vector<Neighbor> all;
  all.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    all.push_back({squared_euclidean(std::invoke(point_of, items[i]), query), i});
  }
  k = std::min(k, all.size());
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  for (auto& n : all) {
    n.distance = std::sqrt(n.distance);
  }
  return all;
}

// Majority vote with the tie rules above. label_of maps a neighbour's item
// index to a class index in [0, ClassCount).
template <std::size_t ClassCount, class LabelOf>
std::size_t vote(std::span<const Neighbor> neighbors, LabelOf label_of) {
  std::array<std::size_t, ClassCount> votes{};
  std::array<double, ClassCount> distance_sum{};
  for (const auto& n : neighbors) {
    const std::size_t c = std::invoke(label_of, n.index);
    ++votes[c];
    distance_sum[c] += n.distance;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < ClassCount; ++c) {
    if (votes[c] > votes[best]) {
      best = c;
    } else if (votes[c] == votes[best] && votes[c] > 0) {
      const double mean_c = distance_sum[c] / static_cast<double>(votes[c]);
      const double mean_best = distance_sum[best] / static_cast<double>(votes[best]);
      if (mean_c < mean_best) {
        best = c;
      }
    }
  }
  return best;
}

struct KnnModel {
  std::vector<LabeledSample> training;
  std::size_t k = kDefaultKnnK;
};

inline void validate(const KnnModel& model) {
  if (model.training.empty()) {
    throw ModelError("kNN model has an empty training set");
  }
  if (model.k < 1 || model.k > model.training.size()) {
    throw ModelError("kNN k must be in [1, " + std::to_string(model.training.size()) + "], got " +
                     std::to_string(model.k));
  }
}

inline PoseLabel knn_predict(const KnnModel& model, const FeatureValues& query) {
  validate(model);
  const std::span<const LabeledSample> samples(model.training);
  const auto neighbors =
      nearest_neighbors(samples, query, model.k, [](const LabeledSample& s) -> const FeatureValues& {
        return s.features.values;
      });
  const std::size_t winner = vote<kPoseClassCount>(
      std::span<const Neighbor>(neighbors), [&](std::size_t i) { return index_of(samples[i].label); });
  return kAllPoseLabels[winner];
}

inline PoseLabel knn_predict(const KnnModel& model, const FeatureVector& query) {
  return knn_predict(model, query.values);
}

}  // namespace shoplift
