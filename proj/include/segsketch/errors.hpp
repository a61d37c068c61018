#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace segsketch {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Prefix derivation on a subnet bitmap with no set cell.
class EmptyBitmap : public std::logic_error {
 public:
  EmptyBitmap() : std::logic_error("subnet bitmap has no set cell") {}
};

// Markov bound requested with a non-positive expected error.
class NonPositiveEpsilon : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace segsketch
