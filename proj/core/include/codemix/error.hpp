#pragma once

#include <stdexcept>
#include <string>

namespace codemix {

enum class ErrorKind {
  kIo,
  kSchema,
  kConfig,
  kDimension,
  kData,
  kCorruption,
  kNumeric,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library. The kind drives CLI exit codes:
// config/schema/io/dimension -> 2, data/corruption -> 3, numeric -> 4.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace codemix
