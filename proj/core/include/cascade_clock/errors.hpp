#pragma once

#include <stdexcept>
#include <string>

namespace cascade_clock {

/// A parameter set violates a documented precondition.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Both quadratures sit exactly at one half, so the phase is undefined.
class DegeneratePhaseError : public std::domain_error {
  public:
    DegeneratePhaseError() : std::domain_error("degenerate phase: quadrature vector has zero length") {}
};

class SearchBoundExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonpositiveProbabilityError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class InsufficientDataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace cascade_clock
