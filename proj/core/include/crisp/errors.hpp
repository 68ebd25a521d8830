#ifndef CRISP_ERRORS_HPP
#define CRISP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crisp {

// Base class for all errors thrown by the library. The CLI maps the
// subclasses to distinct exit codes, so new error sites should pick the
// most specific class that applies.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameters, unknown configuration keys, incompatible shapes.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Mismatched image/volume dimensions between inputs that must agree.
class ShapeError : public ConfigError {
 public:
  explicit ShapeError(const std::string& msg) : ConfigError(msg) {}
};

// Missing files, truncated or malformed file contents, write failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Non-finite values, out-of-domain numbers, failed numerical requirements.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

}  // namespace crisp

#endif
