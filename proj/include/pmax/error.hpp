#pragma once

#include <stdexcept>
#include <string>

namespace pmax {

/// Malformed input file.  Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value that parses but is out of its legal range.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
  using std::logic_error::logic_error;
};

/// Instance cannot be solved as asked (nothing affordable, oracle too large).
class InfeasibleInstance : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace diag {
void warn(const std::string& msg);
void set_quiet(bool quiet);
bool quiet();
}  // namespace diag

}  // namespace pmax
