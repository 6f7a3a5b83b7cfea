#pragma once

// Field-level accessors over nlohmann::json that raise DecodeError with a
// dotted path to the offending field.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "shoplift/errors.hpp"

namespace shoplift {

using Json = nlohmann::json;

class FieldReader {
 public:
  FieldReader(const Json& object, std::string prefix = {}) : object_(object), prefix_(std::move(prefix)) {
    if (!object_.is_object()) {
      throw DecodeError(prefix_.empty() ? "$" : prefix_, "expected object");
    }
  }

  std::string path(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  bool has(std::string_view key) const {
    auto it = object_.find(key);
    return it != object_.end() && !it->is_null();
  }

  const Json& at(std::string_view key) const {
    auto it = object_.find(key);
    if (it == object_.end()) {
      throw DecodeError(path(key), "missing");
    }
    return *it;
  }

  FieldReader object(std::string_view key) const { return FieldReader(at(key), path(key)); }

  std::string string(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_string()) {
      throw DecodeError(path(key), "expected string");
    }
    return v.get<std::string>();
  }

  std::string non_empty_string(std::string_view key) const {
    std::string s = string(key);
    if (s.empty()) {
      throw DecodeError(path(key), "must not be empty");
    }
    return s;
  }

  std::optional<std::string> optional_string(std::string_view key) const {
    if (!has(key)) {
      return std::nullopt;
    }
    return string(key);
  }

  std::int64_t integer(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) {
      throw DecodeError(path(key), "expected integer");
    }
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw DecodeError(path(key), "expected non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double number(std::string_view key) const { return number_value(at(key), path(key)); }

  bool boolean(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_boolean()) {
      throw DecodeError(path(key), "expected boolean");
    }
    return v.get<bool>();
  }

  const Json& array(std::string_view key) const {
    const Json& v = at(key);
    if (!v.is_array()) {
      throw DecodeError(path(key), "expected array");
    }
    return v;
  }

  static double number_value(const Json& v, const std::string& where) {
    if (!v.is_number()) {
      throw DecodeError(where, "expected number");
    }
    double d = v.get<double>();
    if (!std::isfinite(d)) {
      throw DecodeError(where, "must be finite");
    }
    return d;
  }

 private:
  const Json& object_;
  std::string prefix_;
};

}  // namespace shoplift
