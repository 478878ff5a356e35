#pragma once

#include <stdexcept>

namespace mespec {

// Bad configuration or model input. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root finding, conditioning or integration failure. Exit code 2.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed quantity contradicts a structural identity, e.g. an eigenvector
// residual far above tolerance. Signals a bad eigenvalue, not bad input.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mespec
