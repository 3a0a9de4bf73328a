#pragma once

#include <stdexcept>
#include <string>

namespace clk {

// Violated precondition of a mathematical operation (bad parameters, wrong
// half-space, point outside the domain).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Inconsistent or invalid run configuration, detected before any work.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A numerical invariant of a solver was broken (e.g. negative density).
class ConsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace clk
