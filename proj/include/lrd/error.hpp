#ifndef LRD_ERROR_HPP
#define LRD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lrd {

// Invalid environment or run configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration would exceed the configured hypothesis cap.
class TooLargeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Filesystem failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A belief update or posterior left no probability mass.
class InferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrd

#endif  // LRD_ERROR_HPP
