#ifndef ADJSARAH_ERROR_HPP
#define ADJSARAH_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adjsarah {

// Base of every error thrown by the library. The CLI maps subclasses onto
// exit statuses, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when an iterate picks up a non-finite coordinate. `inner` is the
// inner-loop index t, or -1 when the failure happened at an epoch boundary.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, long inner, const std::string& what)
      : Error("diverged at epoch " + std::to_string(epoch) +
              (inner >= 0 ? ", inner step " + std::to_string(inner) : "") +
              ": " + what),
        epoch_(epoch),
        inner_(inner) {}

  std::size_t epoch() const noexcept { return epoch_; }
  long inner() const noexcept { return inner_; }

 private:
  std::size_t epoch_;
  long inner_;
};

}  // namespace adjsarah

#endif  // ADJSARAH_ERROR_HPP
