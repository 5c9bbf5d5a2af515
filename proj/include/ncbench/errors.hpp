#pragma once

#include <stdexcept>
#include <string>

namespace ncbench {

// Base for all library errors. CLI maps each subclass to a distinct exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid QM.N format specification (N > M, M > 32, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Fixed-point accumulator exceeded its configured intermediate width.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Tensor / feature dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite state or diverging integration.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad or missing configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File load/save failures, version or checksum mismatches.
class IoError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncbench
