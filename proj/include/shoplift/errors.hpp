#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace shoplift {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a JSON document does not match a schema or violates an invariant.
// field() names the offending field as a dotted path ("event.anomaly_score").
class DecodeError : public Error {
 public:
  DecodeError(std::string field, const std::string& reason)
      : Error(field + ": " + reason), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class StreamError : public Error {
 public:
  enum class Kind { Malformed, OutOfOrder };

  StreamError(Kind kind, std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), kind_(kind), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A remote peer could not be reached or answered outside the protocol.
class TransportError : public Error {
 public:
  using Error::Error;
};

class InventoryError : public Error {
 public:
  enum class Code { UnknownProduct, Oversell, UnknownPairing, Stale, Unavailable };

  InventoryError(Code code, const std::string& what) : Error(what), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

class ServiceError : public Error {
 public:
  enum class Code { UnknownAlert, Conflict, Validation, UnknownCamera, Unauthorized };

  ServiceError(Code code, const std::string& what) : Error(what), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace shoplift
