#pragma once

// Error taxonomy shared across the library. Each condition named by an
// operation contract gets its own type so tests and the CLI can react to the
// specific failure rather than parsing messages.

#include <stdexcept>
#include <string>

namespace oadp {

struct BasePointError : std::runtime_error {
  explicit BasePointError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedDivisorType : std::invalid_argument {
  explicit UnsupportedDivisorType(const std::string& msg) : std::invalid_argument(msg) {}
};

struct InsufficientSamples : std::invalid_argument {
  explicit InsufficientSamples(const std::string& msg) : std::invalid_argument(msg) {}
};

struct NonSquareError : std::invalid_argument {
  explicit NonSquareError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DegenerateDataError : std::runtime_error {
  explicit DegenerateDataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParityViolationError : std::runtime_error {
  explicit ParityViolationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadricsInsufficientError : std::runtime_error {
  explicit QuadricsInsufficientError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownEntryError : std::invalid_argument {
  explicit UnknownEntryError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct UnknownInvariantError : std::invalid_argument {
  explicit UnknownInvariantError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace oadp
