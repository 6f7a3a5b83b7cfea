#pragma once

// JSON schemas for the core domain values. Field names match the struct members.
//
// Coordinates are encoded as two-element arrays: points is [[x, y], ...],
// face_origin is [x, y] and face_size is [width, height].

#include <string>
#include <string_view>

#include "shoplift/json_fields.hpp"
#include "shoplift/model.hpp"

namespace shoplift {

Json to_json(const LandmarkFrame& frame);
Json to_json(const FeatureVector& features);
Json to_json(const SuspicionEvent& event);
Json to_json(const Alert& alert);
Json to_json(const StaffFeedback& feedback);
Json to_json(const ProductRecord& record);
Json to_json(const SaleTransaction& tx);
Json to_json(const ShelfObservation& obs);
Json to_json(const ReconciliationResult& result);
Json to_json(const LabeledSample& sample);

// Decoders validate every invariant of the target type. prefix is prepended to
// field names in errors so nested decoding reports full paths.
template <class T>
T decode(const Json& j, const std::string& prefix = {});

template <>
LandmarkFrame decode<LandmarkFrame>(const Json& j, const std::string& prefix);
template <>
FeatureVector decode<FeatureVector>(const Json& j, const std::string& prefix);
template <>
SuspicionEvent decode<SuspicionEvent>(const Json& j, const std::string& prefix);
template <>
Alert decode<Alert>(const Json& j, const std::string& prefix);
template <>
StaffFeedback decode<StaffFeedback>(const Json& j, const std::string& prefix);
template <>
ProductRecord decode<ProductRecord>(const Json& j, const std::string& prefix);
template <>
SaleTransaction decode<SaleTransaction>(const Json& j, const std::string& prefix);
template <>
ShelfObservation decode<ShelfObservation>(const Json& j, const std::string& prefix);
template <>
ReconciliationResult decode<ReconciliationResult>(const Json& j, const std::string& prefix);
template <>
LabeledSample decode<LabeledSample>(const Json& j, const std::string& prefix);

Json parse_json(std::string_view bytes);

template <class T>
std::string serialize(const T& value) {
  return to_json(value).dump();
}

template <class T>
T deserialize(std::string_view bytes) {
  return decode<T>(parse_json(bytes));
}

}  // namespace shoplift
