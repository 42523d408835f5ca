#pragma once

#include <stdexcept>
#include <string>

namespace savg {

/// Malformed user input (grammar text, corpus records, weight and model
/// files). Carries the 1-based line number when one applies, else 0.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace savg
