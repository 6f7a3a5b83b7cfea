#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "shoplift/cross_validation.hpp"
#include "support/generators.hpp"

namespace shoplift {
namespace {

TEST(Folds, PaperCorpusSizeSplitsThreeBySevenFolds) {
  const auto folds = partition_folds(1103, 10, 42);
  ASSERT_EQ(folds.size(), 10U);
  std::size_t of_111 = 0;
  std::size_t of_110 = 0;
  for (const auto& f : folds) {
    of_111 += f.size() == 111 ? 1 : 0;
    of_110 += f.size() == 110 ? 1 : 0;
  }
  EXPECT_EQ(of_111, 3U);
  EXPECT_EQ(of_110, 7U);
}

TEST(Folds, PartitionLawsHoldForManySizes) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t folds_wanted = 2 + rng() % 12;
    const std::size_t n = folds_wanted + rng() % 500;
    const std::uint64_t seed = rng();
    const auto folds = partition_folds(n, folds_wanted, seed);
    std::set<std::size_t> seen;
    std::size_t total = 0;
    std::size_t lo = n;
    std::size_t hi = 0;
    for (const auto& f : folds) {
      total += f.size();
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
      seen.insert(f.begin(), f.end());
    }
    EXPECT_EQ(total, n);          // disjoint ...
    EXPECT_EQ(seen.size(), n);    // ... and covering
    EXPECT_EQ(*seen.rbegin(), n - 1);
    EXPECT_LE(hi - lo, 1U);
    EXPECT_EQ(folds, partition_folds(n, folds_wanted, seed));
  }
}

TEST(Folds, DifferentSeedsShuffleDifferently) {
  EXPECT_NE(partition_folds(100, 5, 1), partition_folds(100, 5, 2));
}

TEST(Folds, TooFewSamplesOrFolds) {
  EXPECT_THROW(partition_folds(9, 10, 0), PartitionError);
  EXPECT_THROW(partition_folds(100, 1, 0), PartitionError);
}

std::vector<LabeledSample> separated_clusters(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.01);
  std::vector<LabeledSample> data;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % kPoseClassCount;
    FeatureVector fv;
    for (double& v : fv.values) {
      v = jitter(rng);
    }
    fv.values[c] += 100.0;  // inter-cluster distance ~141, spread ~0.1
    data.push_back({fv, kAllPoseLabels[c]});
  }
  return data;
}

TEST(KFold, SeparatedClustersAreClassifiedPerfectly) {
  const auto data = separated_clusters(120, 3);
  const CvReport report = kfold_cv(data, 10, 17);
  EXPECT_DOUBLE_EQ(report.knn.mean_accuracy, 1.0);
  for (const auto& s : report.knn_sweep) {
    EXPECT_DOUBLE_EQ(s.mean_accuracy, 1.0);
  }
  EXPECT_EQ(report.knn.knn_k, 1U);  // ties keep the first swept k
  EXPECT_EQ(report.fold_sizes.size(), 10U);
}

TEST(KFold, ReportIsInternallyConsistentAndDeterministic) {
  std::mt19937_64 rng(5);
  std::vector<LabeledSample> data;
  const auto pts = testing::random_points(rng, 97, kFeatureDim);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    data.push_back({testing::feature_from(pts[i]), kAllPoseLabels[(i * 7) % 4]});
  }
  const CvReport a = kfold_cv(data, 7, 99);
  const CvReport b = kfold_cv(data, 7, 99);
  EXPECT_EQ(to_json(a), to_json(b));

  for (const ModelCvResult* r : {&a.knn, &a.linear}) {
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t f = 0; f < a.fold_sizes.size(); ++f) {
      EXPECT_GE(r->fold_accuracies[f], 0.0);
      EXPECT_LE(r->fold_accuracies[f], 1.0);
      weighted += r->fold_accuracies[f] * static_cast<double>(a.fold_sizes[f]);
      total += a.fold_sizes[f];
    }
    EXPECT_NEAR(r->mean_accuracy, weighted / static_cast<double>(total), 1e-12);
  }
}

TEST(SelectBetter, HigherMeanWinsAndTiesGoToKnn) {
  CvReport report;
  report.knn.mean_accuracy = 0.80;
  report.linear.mean_accuracy = 0.70;
  EXPECT_EQ(select_better(report), ModelKind::Knn);
  report.knn.mean_accuracy = 0.70;
  report.linear.mean_accuracy = 0.80;
  EXPECT_EQ(select_better(report), ModelKind::Linear);
  report.knn.mean_accuracy = 0.75;
  report.linear.mean_accuracy = 0.75;
  EXPECT_EQ(select_better(report), ModelKind::Knn);
}

}  // namespace
}  // namespace shoplift
