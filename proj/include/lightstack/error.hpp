// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef LIGHTSTACK_ERROR_HPP_
#define LIGHTSTACK_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lightstack {

// Base for every error the toolkit raises on purpose. The CLI maps the
// three subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures: missing files, unwritable outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. Carries the 1-based line and the offending field
// when they are known (line 0 means "not line oriented").
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& field, const std::string& what);

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace lightstack

#endif  // LIGHTSTACK_ERROR_HPP_
