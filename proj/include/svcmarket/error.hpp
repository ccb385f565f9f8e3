#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svcmarket {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One out-of-range or missing configuration field.
struct Violation {
  std::string field;
  std::string value;
  std::string allowed;

  [[nodiscard]] std::string to_string() const {
    if (allowed.empty()) return field + ": " + value;
    return field + "=" + value + " (allowed " + allowed + ")";
  }
};

/// Raised when a scenario fails validation. Carries every violation found,
/// not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<Violation> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  [[nodiscard]] const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

 private:
  static std::string join(const std::vector<Violation>& vs) {
    std::string out = "invalid scenario:";
    for (const auto& v : vs) out += "\n  " + v.to_string();
    return out;
  }

  std::vector<Violation> violations_;
};

/// Raised when an output directory already holds results and overwriting
/// was not requested.
class OutputExists : public Error {
 public:
  using Error::Error;
};

class InvalidOrderType : public Error {
 public:
  using Error::Error;
};

class OutOfCycle : public Error {
 public:
  using Error::Error;
};

class BadParams : public Error {
 public:
  using Error::Error;
};

class NodeOutOfRange : public Error {
 public:
  using Error::Error;
};

class TypeMismatch : public Error {
 public:
  using Error::Error;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroCapacity : public Error {
 public:
  using Error::Error;
};

class MissingReferenceTime : public Error {
 public:
  using Error::Error;
};

class EmptyLog : public Error {
 public:
  using Error::Error;
};

class NegativeInput : public Error {
 public:
  using Error::Error;
};

class MissingResults : public Error {
 public:
  using Error::Error;
};

}  // namespace svcmarket
