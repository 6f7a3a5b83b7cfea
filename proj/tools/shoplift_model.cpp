// Pose model training and cross-validation over a labeled dataset.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "shoplift/classifier.hpp"
#include "shoplift/cross_validation.hpp"

using namespace shoplift;

namespace {

std::vector<LabeledSample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read dataset " + path);
  }
  return read_dataset(in);
}

void print_summary(const CvReport& r) {
  std::cerr << "folds " << r.fold_count << ", seed " << r.seed << '\n'
            << "knn (k=" << r.knn.knn_k << ")  mean accuracy " << r.knn.mean_accuracy << '\n'
            << "linear       mean accuracy " << r.linear.mean_accuracy << '\n'
            << "selected     " << to_string(r.selected_kind) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shoplift pose model tool"};
  app.require_subcommand(1);

  std::string data;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t epochs = kDefaultLinearEpochs;

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation of both model kinds; JSON report on stdout");
  cv->add_option("--data", data, "labeled dataset (NDJSON)")->required()->check(CLI::ExistingFile);
  cv->add_option("--folds", folds, "fold count")->capture_default_str();
  cv->add_option("--seed", seed, "fold shuffle seed")->capture_default_str();
  cv->add_option("--epochs", epochs, "linear model epochs")->capture_default_str();

  std::string kind_text = "auto";
  std::size_t k = 0;
  std::string out;
  auto* train = app.add_subcommand("train", "train a model on the whole dataset");
  train->add_option("--data", data, "labeled dataset (NDJSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--kind", kind_text, "KNN, Linear, or auto (pick the better by cross-validation)")
      ->capture_default_str();
  train->add_option("--k", k, "neighbours for kNN; 0 takes the cross-validated best");
  train->add_option("--folds", folds, "fold count for auto selection")->capture_default_str();
  train->add_option("--seed", seed, "seed for folds and training")->capture_default_str();
  train->add_option("--epochs", epochs, "linear model epochs")->capture_default_str();
  train->add_option("--out", out, "model file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto samples = load_dataset(data);
    CvOptions cv_options;
    cv_options.linear_epochs = epochs;
    if (cv->parsed()) {
      const CvReport report = kfold_cv(samples, folds, seed, cv_options);
      print_summary(report);
      std::cout << to_json(report).dump(2) << '\n';
      return 0;
    }

    std::optional<ModelKind> kind = parse_model_kind(kind_text);
    if (!kind && kind_text != "auto") {
      throw ConfigError("unknown model kind '" + kind_text + "'");
    }
    TrainOptions options;
    options.seed = seed;
    options.linear_epochs = epochs;
    std::vector<double> fold_accuracies;
    if (!kind || (*kind == ModelKind::Knn && k == 0)) {
      const CvReport report = kfold_cv(samples, folds, seed, cv_options);
      print_summary(report);
      if (!kind) {
        kind = report.selected_kind;
      }
      const ModelCvResult& chosen = *kind == ModelKind::Knn ? report.knn : report.linear;
      fold_accuracies = chosen.fold_accuracies;
      options.knn_k = report.knn.knn_k;
    }
    if (k > 0) {
      options.knn_k = k;
    }
    TrainedModel model = train_model(*kind, samples, options);
    model.metadata.fold_accuracies = fold_accuracies;
    save_model(out, model);
    std::cerr << "wrote " << to_string(model.kind()) << " model to " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
