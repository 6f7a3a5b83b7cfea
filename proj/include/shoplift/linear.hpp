#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "shoplift/model.hpp"

namespace shoplift {

inline constexpr std::size_t kDefaultLinearEpochs = 10;

// One weight row and bias per pose class; score_c(x) = w_c . x + b_c.
struct LinearModel {
  std::array<FeatureValues, kPoseClassCount> weights{};
  std::array<double, kPoseClassCount> bias{};

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

std::array<double, kPoseClassCount> linear_scores(const LinearModel& model, const FeatureValues& x);

// argmax of linear_scores; ties go to the lowest class index.
PoseLabel linear_predict(const LinearModel& model, const FeatureValues& x);

inline PoseLabel linear_predict(const LinearModel& model, const FeatureVector& x) {
  return linear_predict(model, x.values);
}

// Multiclass averaged perceptron. Features are standardized per dimension
// during training and the transform is folded back into the returned weights,
// so the model applies directly to raw normalized vectors. Each epoch visits
// the samples in an order drawn from a generator seeded with `seed`.
// Throws TrainingError when data is empty or a class has no samples.
LinearModel linear_train(std::span<const LabeledSample> data, std::size_t epochs, std::uint64_t seed);

}  // namespace shoplift
