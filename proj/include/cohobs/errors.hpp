#pragma once

#include <stdexcept>
#include <string>

namespace cohobs {

// Shape or evenness violation in a matrix argument.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input that is well-formed but outside the domain of an operation
// (non-finite entries, asymmetric covariance, invalid Gaussian state).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Coefficient matrices that do not describe a physical open oscillator.
class NotRealizableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No coupling matrix reproduces the given output matrix C.
class InversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix that must be Hurwitz is not.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix equation without a unique solution, or a singular solve.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition of a synthesis routine not met (e.g. plant drift not Hurwitz).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested observer cannot be built for this plant and gain.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values encountered while integrating moments.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Internal numerical identity violated beyond tolerance.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cohobs
