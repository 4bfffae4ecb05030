// Copyright 2026 The smdn Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SMDN_ERRORS_HPP_
#define SMDN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace smdn {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input signal too short for the requested operation.
class LengthError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Non-finite loss or gradient during training.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file contents (WAV, checkpoint, manifest).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or missing pipeline prerequisite.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A speech or noise segment carried no energy; the caller should redraw.
class SilentSegmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smdn

#endif  // SMDN_ERRORS_HPP_
