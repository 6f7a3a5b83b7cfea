#include "shoplift/classifier.hpp"

#include <fstream>
#include <sstream>

#include "shoplift/codec.hpp"

namespace shoplift {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::Knn ? "KNN" : "Linear"; }

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  if (text == "KNN") {
    return ModelKind::Knn;
  }
  if (text == "Linear") {
    return ModelKind::Linear;
  }
  return std::nullopt;
}

void validate(const TrainedModel& model) {
  if (const auto* knn = std::get_if<KnnModel>(&model.parameters)) {
    validate(*knn);
    return;
  }
  const auto& linear = std::get<LinearModel>(model.parameters);
  for (const auto& row : linear.weights) {
    for (double w : row) {
      if (!std::isfinite(w)) {
        throw ModelError("linear model has a non-finite weight");
      }
    }
  }
  for (double b : linear.bias) {
    if (!std::isfinite(b)) {
      throw ModelError("linear model has a non-finite bias");
    }
  }
}

PoseLabel predict(const TrainedModel& model, const FeatureValues& x) {
  return std::visit(
      [&](const auto& params) -> PoseLabel {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          return knn_predict(params, x);
        } else {
          return linear_predict(params, x);
        }
      },
      model.parameters);
}

TrainedModel train_model(ModelKind kind, std::span<const LabeledSample> data, const TrainOptions& options) {
  TrainedModel model;
  model.metadata.seed = options.seed;
  if (kind == ModelKind::Knn) {
    KnnModel knn{std::vector<LabeledSample>(data.begin(), data.end()), options.knn_k};
    validate(knn);
    model.parameters = std::move(knn);
  } else {
    model.parameters = linear_train(data, options.linear_epochs, options.seed);
  }
  return model;
}

Json to_json(const TrainedModel& model) {
  Json params;
  if (const auto* knn = std::get_if<KnnModel>(&model.parameters)) {
    Json training = Json::array();
    for (const auto& s : knn->training) {
      training.push_back(to_json(s));
    }
    params = {{"k", knn->k}, {"training", std::move(training)}};
  } else {
    const auto& linear = std::get<LinearModel>(model.parameters);
    params = {{"weights", linear.weights}, {"bias", linear.bias}};
  }
  return {{"kind", std::string(to_string(model.kind()))},
          {"parameters", std::move(params)},
          {"metadata", {{"seed", model.metadata.seed}, {"fold_accuracies", model.metadata.fold_accuracies}}}};
}

TrainedModel model_from_json(const Json& j) {
  FieldReader r(j);
  const std::string kind_text = r.string("kind");
  const auto kind = parse_model_kind(kind_text);
  if (!kind) {
    throw DecodeError("kind", "expected KNN or Linear, got '" + kind_text + "'");
  }
  TrainedModel model;
  FieldReader params = r.object("parameters");
  if (*kind == ModelKind::Knn) {
    KnnModel knn;
    knn.k = params.unsigned_integer("k");
    const Json& training = params.array("training");
    for (std::size_t i = 0; i < training.size(); ++i) {
      knn.training.push_back(
          decode<LabeledSample>(training[i], "parameters.training[" + std::to_string(i) + "]"));
    }
    model.parameters = std::move(knn);
  } else {
    LinearModel linear;
    const Json& weights = params.array("weights");
    if (weights.size() != kPoseClassCount) {
      throw DecodeError("parameters.weights", "expected 4 class rows");
    }
    for (std::size_t c = 0; c < kPoseClassCount; ++c) {
      const std::string where = "parameters.weights[" + std::to_string(c) + "]";
      if (!weights[c].is_array() || weights[c].size() != kFeatureDim) {
        throw DecodeError(where, "expected 136 weights");
      }
      for (std::size_t d = 0; d < kFeatureDim; ++d) {
        linear.weights[c][d] = FieldReader::number_value(weights[c][d], where);
      }
    }
    const Json& bias = params.array("bias");
    if (bias.size() != kPoseClassCount) {
      throw DecodeError("parameters.bias", "expected 4 biases");
    }
    for (std::size_t c = 0; c < kPoseClassCount; ++c) {
      linear.bias[c] = FieldReader::number_value(bias[c], "parameters.bias");
    }
    model.parameters = linear;
  }
  if (r.has("metadata")) {
    FieldReader meta = r.object("metadata");
    model.metadata.seed = meta.has("seed") ? meta.unsigned_integer("seed") : 0;
    if (meta.has("fold_accuracies")) {
      for (const auto& a : meta.array("fold_accuracies")) {
        model.metadata.fold_accuracies.push_back(FieldReader::number_value(a, "metadata.fold_accuracies"));
      }
    }
  }
  try {
    validate(model);
  } catch (const ModelError& e) {
    throw DecodeError("parameters", e.what());
  }
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write model file " + path.string());
  }
  out << to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot read model file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(parse_json(buffer.str()));
}

std::vector<LabeledSample> read_dataset(std::istream& in) {
  std::vector<LabeledSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      samples.push_back(deserialize<LabeledSample>(line));
    } catch (const DecodeError& e) {
      throw StreamError(StreamError::Kind::Malformed, line_no, e.what());
    }
  }
  return samples;
}

void write_dataset(std::ostream& out, std::span<const LabeledSample> samples) {
  for (const auto& s : samples) {
    out << serialize(s) << '\n';
  }
}

}  // namespace shoplift
