#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "shoplift/classifier.hpp"
#include "shoplift/errors.hpp"
#include "shoplift/rng.hpp"

namespace shoplift {

// Shuffles 0..n-1 with `seed` and cuts the permutation into fold_count
// contiguous folds; the first n % fold_count folds get one extra index.
inline std::vector<std::vector<std::size_t>> partition_folds(std::size_t n, std::size_t fold_count,
                                                             std::uint64_t seed) {
  if (fold_count < 2) {
    throw PartitionError("fold_count must be >= 2");
  }
  if (n < fold_count) {
    throw PartitionError("need at least " + std::to_string(fold_count) + " samples, got " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix64(seed));
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<std::size_t>> folds(fold_count);
  const std::size_t base = n / fold_count;
  const std::size_t extra = n % fold_count;
  std::size_t start = 0;
  for (std::size_t f = 0; f < fold_count; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                    order.begin() + static_cast<std::ptrdiff_t>(start + size));
    start += size;
  }
  return folds;
}

struct ModelCvResult {
  ModelKind kind = ModelKind::Knn;
  std::size_t knn_k = 0;  // 0 for the linear model
  std::vector<std::size_t> fold_correct;
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;  // total correct / total samples
};

struct CvReport {
  std::size_t fold_count = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_sizes;
  std::vector<ModelCvResult> knn_sweep;  // one entry per swept k
  ModelCvResult knn;                     // best entry of knn_sweep
  ModelCvResult linear;
  ModelKind selected_kind = ModelKind::Knn;
};

struct CvOptions {
  std::vector<std::size_t> knn_ks{1, 3, 5, 11};
  std::size_t linear_epochs = kDefaultLinearEpochs;
};

// Trains and scores both model kinds on every fold.
CvReport kfold_cv(std::span<const LabeledSample> data, std::size_t fold_count, std::uint64_t seed,
                  const CvOptions& options = {});

// Higher mean accuracy wins; an exact tie selects kNN.
ModelKind select_better(const CvReport& report);

Json to_json(const CvReport& report);

}  // namespace shoplift
