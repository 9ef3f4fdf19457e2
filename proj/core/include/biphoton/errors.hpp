#pragma once

#include <stdexcept>

namespace biphoton {

// Lens systems composed with mismatched scale length f'.
struct AdditivityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Position sub-block of a covariance matrix is too singular to sample from.
struct DegenerateDensity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nonlinear peak fit did not converge; the message carries diagnostics.
struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
