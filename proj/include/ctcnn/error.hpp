#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ctcnn {

// Root of every error the toolkit throws. The CLI maps the concrete type onto
// an exit code, so throw the most specific subclass available.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or lengths that do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An operation was called out of order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Invalid hyperparameter, preset name or flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed CTT1/CNCK file. Carries the byte offset at which parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        detail_(what),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::uint64_t offset_;
};

// Image that cannot be decoded.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Dataset tree problems (missing root, no classes).
class DatasetError : public Error {
 public:
  using Error::Error;
};

class FilesystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctcnn
