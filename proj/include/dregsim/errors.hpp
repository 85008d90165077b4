#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dregsim {

// Precondition or parameter-range violation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An SGD iterate became non-finite. `step()` is the 1-based sample index
// whose update produced the bad value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Ridge at zero regularization hit a rank-deficient system. Use dols().
class SingularGramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bound's hypothesis (e.g. the stepsize condition) does not hold, so
// the bound is undefined.
class HypothesisViolated : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Configuration file problem tied to a specific key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Malformed input file line (1-based).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dregsim
