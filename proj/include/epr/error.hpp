// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace epr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EigensolverFailure : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an outcome whose probability is below the zero threshold.
class ImpossibleOutcome : public Error {
 public:
  using Error::Error;
};

/// A named domain invariant does not hold (non-Hermitian input, com1
/// inconsistency, zero-norm state, ...). `what_field()` names the offender.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& what_field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed input document (syntax, schema, or shape errors).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace epr
