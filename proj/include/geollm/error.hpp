#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geollm {

enum class ErrorKind {
  kValidation,
  kClassification,
  kRange,
  kMissingData,
  kGeometry,
  kUnsupported,
  kParse,
  kConsistency,
  kNotFound,
  kCorruption,
  kRegistration,
  kProtocol,
  kTransport,
  kScriptExhausted,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Base of every domain error raised by the library. The kind lets callers
// (the CLI in particular) categorize failures without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorKind::kValidation, m) {}
};

class ClassificationError : public Error {
 public:
  ClassificationError(const std::string& m, std::string missing_field)
      : Error(ErrorKind::kClassification, m), missing_field_(std::move(missing_field)) {}

  const std::string& missing_field() const noexcept { return missing_field_; }

 private:
  std::string missing_field_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& m) : Error(ErrorKind::kRange, m) {}
};

class MissingDataError : public Error {
 public:
  explicit MissingDataError(const std::string& m) : Error(ErrorKind::kMissingData, m) {}
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& m) : Error(ErrorKind::kGeometry, m) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& m) : Error(ErrorKind::kUnsupported, m) {}
};

// Carries a 1-based line/column when the input was text.
class ParseError : public Error {
 public:
  ParseError(const std::string& m, std::size_t line = 0, std::size_t column = 0)
      : Error(ErrorKind::kParse, line == 0 ? m
                                           : m + " at line " + std::to_string(line) +
                                                 ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& m) : Error(ErrorKind::kConsistency, m) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& m) : Error(ErrorKind::kNotFound, m) {}
};

class CorruptionError : public Error {
 public:
  explicit CorruptionError(const std::string& m) : Error(ErrorKind::kCorruption, m) {}
};

class RegistrationError : public Error {
 public:
  explicit RegistrationError(const std::string& m) : Error(ErrorKind::kRegistration, m) {}
};

// Malformed model output. raw() is the offending text, verbatim.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& m, std::string raw)
      : Error(ErrorKind::kProtocol, m), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& m, int status, int attempts, bool retryable)
      : Error(ErrorKind::kTransport, m),
        status_(status),
        attempts_(attempts),
        retryable_(retryable) {}

  // 0 when no HTTP response was received.
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  int attempts_;
  bool retryable_;
};

class ScriptExhaustedError : public Error {
 public:
  explicit ScriptExhaustedError(const std::string& m) : Error(ErrorKind::kScriptExhausted, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

}  // namespace geollm
