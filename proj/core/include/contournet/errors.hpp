#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contournet {

enum class ErrorKind {
  kInvalidPolygon,
  kInvalidGrid,
  kInvalidConfig,
  kInvalidInput,
  kNumericalError,
  kTooFewCandidates,
  kDegenerateGeometry,
  kParseError,
  kFormatError,
  kPlacementError,
};

const char* to_string(ErrorKind kind);

/// Base class of every exception thrown by the library. The kind lets
/// callers (the CLI in particular) map failures to exit codes without a
/// cascade of catch clauses.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define CONTOURNET_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message)                          \
        : Error(ErrorKind::k##Name, message) {}                         \
  };

CONTOURNET_DEFINE_ERROR(InvalidPolygon)
CONTOURNET_DEFINE_ERROR(InvalidGrid)
CONTOURNET_DEFINE_ERROR(InvalidConfig)
CONTOURNET_DEFINE_ERROR(InvalidInput)
CONTOURNET_DEFINE_ERROR(NumericalError)
CONTOURNET_DEFINE_ERROR(TooFewCandidates)
CONTOURNET_DEFINE_ERROR(DegenerateGeometry)
CONTOURNET_DEFINE_ERROR(FormatError)
CONTOURNET_DEFINE_ERROR(PlacementError)

#undef CONTOURNET_DEFINE_ERROR

/// Malformed annotation text. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::kParseError,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace contournet
