#pragma once

#include <stdexcept>
#include <string>

namespace phaseforge {

/// Invalid construction parameters (bad ring descriptor, out-of-range sizes).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed an enumeration or derivative-order budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments live in incompatible spaces (rank mismatch, foreign ring).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A defect strategy was asked about a phase outside its domain.
class StrategyDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed scenario configuration or command-line input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A phase datum failed the admissibility required by the requested operation.
class AdmissibilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A self-check failed; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace phaseforge
