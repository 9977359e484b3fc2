#pragma once

#include <stdexcept>
#include <string>

namespace mad {

// Invalid configuration supplied by the caller (bad topology, missing weight, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: a precondition of an operation was violated.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// I/O or data-format failure (malformed dataset row, truncated transcript line).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mad
