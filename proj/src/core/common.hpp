#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace paikit {

// Failure categories surfaced across the library and mapped to C API codes.
enum class ErrorKind {
  Io,
  Parse,
  Validation,
  Schema,
  DegenerateGeometry,
  DegenerateSample,
  Design,
  Config,
  Shape,
  Optimizer,
  Unsupported,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace paikit
