#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Bad arguments, violated preconditions, malformed scenario input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular frames, degenerate metrics, integrator blow-up, quadrature failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forge
