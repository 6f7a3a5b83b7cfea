#include "shoplift/cross_validation.hpp"

namespace shoplift {

namespace {

void finish(ModelCvResult& result, std::span<const std::size_t> fold_sizes) {
  std::size_t correct = 0;
  std::size_t total = 0;
  result.fold_accuracies.clear();
  for (std::size_t f = 0; f < fold_sizes.size(); ++f) {
    result.fold_accuracies.push_back(static_cast<double>(result.fold_correct[f]) /
                                     static_cast<double>(fold_sizes[f]));
    correct += result.fold_correct[f];
    total += fold_sizes[f];
  }
  result.mean_accuracy = static_cast<double>(correct) / static_cast<double>(total);
}

Json result_json(const ModelCvResult& r) {
  Json j = {{"kind", std::string(to_string(r.kind))},
            {"fold_correct", r.fold_correct},
            {"fold_accuracies", r.fold_accuracies},
            {"mean_accuracy", r.mean_accuracy}};
  if (r.kind == ModelKind::Knn) {
    j["k"] = r.knn_k;
  }
  return j;
}

}  // namespace

CvReport kfold_cv(std::span<const LabeledSample> data, std::size_t fold_count, std::uint64_t seed,
                  const CvOptions& options) {
  if (options.knn_ks.empty()) {
    throw PartitionError("kfold_cv: no kNN k values to evaluate");
  }
  const auto folds = partition_folds(data.size(), fold_count, seed);

  CvReport report;
  report.fold_count = fold_count;
  report.seed = seed;
  for (const auto& fold : folds) {
    report.fold_sizes.push_back(fold.size());
  }
  for (std::size_t k : options.knn_ks) {
    report.knn_sweep.push_back({ModelKind::Knn, k, {}, {}, 0.0});
  }
  report.linear = {ModelKind::Linear, 0, {}, {}, 0.0};

  std::vector<bool> in_test(data.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::fill(in_test.begin(), in_test.end(), false);
    for (std::size_t i : folds[f]) {
      in_test[i] = true;
    }
    std::vector<LabeledSample> train;
    train.reserve(data.size() - folds[f].size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!in_test[i]) {
        train.push_back(data[i]);
      }
    }

    for (auto& sweep : report.knn_sweep) {
      const KnnModel model{train, sweep.knn_k};
      validate(model);
      std::size_t correct = 0;
      for (std::size_t i : folds[f]) {
        correct += knn_predict(model, data[i].features) == data[i].label ? 1 : 0;
      }
      sweep.fold_correct.push_back(correct);
    }

    const LinearModel linear = linear_train(train, options.linear_epochs, mix64(seed + f + 1));
    std::size_t correct = 0;
    for (std::size_t i : folds[f]) {
      correct += linear_predict(linear, data[i].features) == data[i].label ? 1 : 0;
    }
    report.linear.fold_correct.push_back(correct);
  }

  for (auto& sweep : report.knn_sweep) {
    finish(sweep, report.fold_sizes);
  }
  finish(report.linear, report.fold_sizes);

  // Best k; the earlier (smaller) k wins ties.
  report.knn = report.knn_sweep.front();
  for (const auto& sweep : report.knn_sweep) {
    if (sweep.mean_accuracy > report.knn.mean_accuracy) {
      report.knn = sweep;
    }
  }
  report.selected_kind = select_better(report);
  return report;
}

ModelKind select_better(const CvReport& report) {
  return report.linear.mean_accuracy > report.knn.mean_accuracy ? ModelKind::Linear : ModelKind::Knn;
}

Json to_json(const CvReport& report) {
  Json sweep = Json::array();
  for (const auto& s : report.knn_sweep) {
    sweep.push_back(result_json(s));
  }
  return {{"fold_count", report.fold_count},
          {"seed", report.seed},
          {"fold_sizes", report.fold_sizes},
          {"knn_sweep", std::move(sweep)},
          {"knn", result_json(report.knn)},
          {"linear", result_json(report.linear)},
          {"selected_kind", std::string(to_string(report.selected_kind))}};
}

}  // namespace shoplift
