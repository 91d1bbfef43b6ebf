#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperconn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments outside an operation's documented domain.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateVariance : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class InsufficientSamples : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class InsufficientVariables : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class DegenerateLabels : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace hyperconn
