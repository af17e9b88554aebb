#pragma once

#include <stdexcept>
#include <string>

namespace magstep {

// Base of everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input or violated preconditions (CLI exit code 1).
class InputError : public Error {
 public:
  using Error::Error;
};

class RangeError : public InputError {
 public:
  using InputError::InputError;
};

class NotHermitian : public InputError {
 public:
  using InputError::InputError;
};

class GaugeDiscontinuity : public InputError {
 public:
  GaugeDiscontinuity(const std::string& what, double jump) : InputError(what), jump_(jump) {}
  double jump() const { return jump_; }

 private:
  double jump_;
};

// The requested bound state does not lie below the essential spectrum.
class NotBelowEssential : public InputError {
 public:
  NotBelowEssential(const std::string& what, double value, double threshold)
      : InputError(what), value_(value), threshold_(threshold) {}
  double value() const { return value_; }
  double threshold() const { return threshold_; }

 private:
  double value_, threshold_;
};

// Agmon-type hypotheses (eigenvalue strictly below the threshold) do not hold.
class AssumptionFails : public InputError {
 public:
  using InputError::InputError;
};

// Numerical trouble (CLI exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, int iterations, double best_residual)
      : NumericalError(what), iterations_(iterations), best_residual_(best_residual) {}
  int iterations() const { return iterations_; }
  double best_residual() const { return best_residual_; }

 private:
  int iterations_;
  double best_residual_;
};

class MinimizerNotBracketed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridTooSmall : public NumericalError {
 public:
  GridTooSmall(const std::string& what, double wall_mass) : NumericalError(what), wall_mass_(wall_mass) {}
  double wall_mass() const { return wall_mass_; }

 private:
  double wall_mass_;
};

class MonotonicityViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TailTooShort : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The box needed for the requested parameters exceeds the node budget.
class ProblemTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace magstep
