#pragma once

#include <stdexcept>
#include <string>

namespace cylbif {

// Invalid input: bad lengths, nonpositive heights, too-coarse grids, malformed configs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// cos(sqrt(lambda_t - sigma) t) vanished: the modal boundary-value problem has no solution.
class ResonanceError : public NumericalError {
 public:
  ResonanceError(const std::string& what, int mode) : NumericalError(what), mode_(mode) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_residual)
      : NumericalError(what), iterations_(iterations), last_residual_(last_residual) {}
  int iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  int iterations_;
  double last_residual_;
};

}  // namespace cylbif
