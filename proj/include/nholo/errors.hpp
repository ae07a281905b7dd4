// Exception types shared across the library. Every failure mode that callers
// are expected to handle programmatically gets its own type; the CLI maps them
// to distinct exit codes.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nholo {

// Malformed source text. `offset` is the 0-based byte offset of the first
// offending character in the input string.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error("parse error at offset " + std::to_string(offset) +
                           ": " + message),
        offset_(offset),
        message_(message) {}

  std::size_t offset() const { return offset_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

// Evaluation left the domain of an elementary function (log of a nonpositive
// value, division by zero, ...). `fragment` is the offending subexpression in
// source form; `offset` locates it in the original input.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string reason, std::string fragment, std::size_t offset)
      : std::runtime_error("domain error at offset " + std::to_string(offset) +
                           ": " + reason + " in '" + fragment + "'"),
        reason_(std::move(reason)),
        fragment_(std::move(fragment)),
        offset_(offset) {}

  explicit DomainError(std::string reason)
      : std::runtime_error("domain error: " + reason),
        reason_(std::move(reason)),
        offset_(0) {}

  const std::string& reason() const { return reason_; }
  const std::string& fragment() const { return fragment_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string reason_;
  std::string fragment_;
  std::size_t offset_;
};

// A matrix that must be invertible fell below the pivot threshold.
class DegenerateMetricError : public std::runtime_error {
 public:
  explicit DegenerateMetricError(const std::string& what)
      : std::runtime_error(what) {}
};

// Configuration problems. Collects every error found in one pass so a user
// can fix them all at once.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = "configuration invalid:";
    for (const auto& e : errors) out += "\n  - " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

}  // namespace nholo
