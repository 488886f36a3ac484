#pragma once

#include <stdexcept>
#include <string>

namespace tsou {

// Raised when a parameter falls outside the domain of a law or map.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for malformed user input: grids, configs, CLI values.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A Lévy density whose a-remainder is not a Lévy density.
class NotSelfDecomposableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The hypotheses behind the tempered-stable remainder split failed.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or iteration failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsou
