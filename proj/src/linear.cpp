#include "shoplift/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "shoplift/errors.hpp"
#include "shoplift/rng.hpp"

namespace shoplift {

std::array<double, kPoseClassCount> linear_scores(const LinearModel& model, const FeatureValues& x) {
  std::array<double, kPoseClassCount> scores{};
  for (std::size_t c = 0; c < kPoseClassCount; ++c) {
    scores[c] = std::inner_product(x.begin(), x.end(), model.weights[c].begin(), model.bias[c]);
  }
  return scores;
}

namespace {

template <class Scores>
std::size_t argmax(const Scores& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) {
      best = c;
    }
  }
  return best;
}

}  // namespace

PoseLabel linear_predict(const LinearModel& model, const FeatureValues& x) {
  return kAllPoseLabels[argmax(linear_scores(model, x))];
}

LinearModel linear_train(std::span<const LabeledSample> data, std::size_t epochs, std::uint64_t seed) {
  if (data.empty()) {
    throw TrainingError("linear_train: empty training set");
  }
  std::array<std::size_t, kPoseClassCount> per_class{};
  for (const auto& s : data) {
    ++per_class[index_of(s.label)];
  }
  for (std::size_t c = 0; c < kPoseClassCount; ++c) {
    if (per_class[c] == 0) {
      throw TrainingError("linear_train: class " + std::string(to_string(kAllPoseLabels[c])) +
                          " has no training samples");
    }
  }

  const std::size_t n = data.size();
  FeatureValues mean{};
  FeatureValues scale{};
  for (const auto& s : data) {
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      mean[d] += s.features.values[d];
    }
  }
  for (double& m : mean) {
    m /= static_cast<double>(n);
  }
  for (const auto& s : data) {
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      const double dev = s.features.values[d] - mean[d];
      scale[d] += dev * dev;
    }
  }
  for (double& v : scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 0.0)) {
      v = 1.0;
    }
  }

  std::vector<FeatureValues> standardized(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      standardized[i][d] = (data[i].features.values[d] - mean[d]) / scale[d];
    }
  }

  // Averaged perceptron via the running-sum trick: the average of all
  // intermediate weight vectors equals w - u / t.
  LinearModel w;
  LinearModel u;
  double t = 1.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix64(seed));

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const FeatureValues& x = standardized[i];
      const std::size_t truth = index_of(data[i].label);
      const std::size_t guess = argmax(linear_scores(w, x));
      if (guess != truth) {
        for (std::size_t d = 0; d < kFeatureDim; ++d) {
          w.weights[truth][d] += x[d];
          w.weights[guess][d] -= x[d];
          u.weights[truth][d] += t * x[d];
          u.weights[guess][d] -= t * x[d];
        }
        w.bias[truth] += 1.0;
        w.bias[guess] -= 1.0;
        u.bias[truth] += t;
        u.bias[guess] -= t;
      }
      t += 1.0;
    }
  }

  // Fold standardization back: w.((x - mean) / scale) + b == (w / scale).x + (b - (w / scale).mean)
  LinearModel out;
  for (std::size_t c = 0; c < kPoseClassCount; ++c) {
    double shift = 0.0;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      const double averaged = w.weights[c][d] - u.weights[c][d] / t;
      out.weights[c][d] = averaged / scale[d];
      shift += out.weights[c][d] * mean[d];
    }
    out.bias[c] = (w.bias[c] - u.bias[c] / t) - shift;
  }
  return out;
}

}  // namespace shoplift
