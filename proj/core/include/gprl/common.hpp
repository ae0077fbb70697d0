#ifndef GPRL_COMMON_HPP
#define GPRL_COMMON_HPP

#include <stdexcept>
#include <string>

namespace gprl {

// Base for all recoverable errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input data or configuration. CLI maps these to exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

// Malformed file contents (JSON syntax, bad checkpoint, ...).
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

// Unknown label / token outside the vocabulary.
struct VocabError : ValidationError {
  using ValidationError::ValidationError;
};

// Filesystem problems. CLI maps these to exit code 2.
struct IoError : Error {
  using Error::Error;
};

// Histogram too small to fit moments.
struct InsufficientDataError : ValidationError {
  using ValidationError::ValidationError;
};

// RL requested before the supervised pretraining gate is met.
struct ScheduleError : Error {
  using Error::Error;
};

// Internal API misuse (caller broke a documented precondition).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace gprl

#endif  // GPRL_COMMON_HPP
