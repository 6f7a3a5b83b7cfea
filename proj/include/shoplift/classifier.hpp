#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "shoplift/json_fields.hpp"
#include "shoplift/knn.hpp"
#include "shoplift/linear.hpp"

namespace shoplift {

enum class ModelKind : std::uint8_t { Knn, Linear };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

struct ModelMetadata {
  std::uint64_t seed = 0;
  std::vector<double> fold_accuracies;
};

struct TrainedModel {
  std::variant<KnnModel, LinearModel> parameters;
  ModelMetadata metadata;

  ModelKind kind() const { return parameters.index() == 0 ? ModelKind::Knn : ModelKind::Linear; }
};

// Throws ModelError if the parameters break the model invariants.
void validate(const TrainedModel& model);

PoseLabel predict(const TrainedModel& model, const FeatureValues& x);

struct TrainOptions {
  std::size_t knn_k = kDefaultKnnK;
  std::size_t linear_epochs = kDefaultLinearEpochs;
  std::uint64_t seed = 0;
};

TrainedModel train_model(ModelKind kind, std::span<const LabeledSample> data, const TrainOptions& options);

// Model file: {"kind": "KNN"|"Linear", "parameters": {...}, "metadata": {"seed", "fold_accuracies"}}.
Json to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

// Dataset file: newline-delimited LabeledSample JSON.
std::vector<LabeledSample> read_dataset(std::istream& in);
void write_dataset(std::ostream& out, std::span<const LabeledSample> samples);

}  // namespace shoplift
