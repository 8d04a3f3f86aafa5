#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hierkraft {

// Malformed user input: bad symbols, unknown nodes, broken file lines.
// line() is 1-based when the error comes from a file, 0 otherwise.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what, std::size_t line = 0)
      : std::invalid_argument(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The root allocator cannot serve a request: the total requested space (plus
// contamination) has exceeded the unit interval.
class KraftViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ledger balance would become negative. Never raised on valid inputs; it
// marks a broken accounting step.
class LedgerUnderflow : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hierkraft
