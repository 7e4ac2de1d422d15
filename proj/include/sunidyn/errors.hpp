#pragma once

#include <stdexcept>
#include <string>

namespace sunidyn {

// Violated precondition or malformed input. The CLI maps this to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// A construction would exceed a configured size bound (e.g. the polynomial
// degree cap). Also maps to exit code 2.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sunidyn
