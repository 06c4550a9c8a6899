#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scholrec {

// Bad input data: a record, request body or log entry that breaks an invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what, std::string field = {})
      : std::runtime_error(what), field_(std::move(field)) {}

  // Path of the offending field ("document.year"), empty when not field-specific.
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed serialized input (JSON / CSV) at a known line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violation on a numeric API (df > N, negative counts, k < 1...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace scholrec
