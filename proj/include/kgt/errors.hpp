#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kgt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MomentumViolation : public Error {
 public:
  using Error::Error;
};

class DegreeOverflow : public Error {
 public:
  using Error::Error;
};

class RepresentationError : public Error {
 public:
  using Error::Error;
};

class NoContraction : public Error {
 public:
  using Error::Error;
};

class SmallDivisor : public Error {
 public:
  SmallDivisor(std::vector<std::pair<int, int>> ell, double divisor, double floor);

  const std::vector<std::pair<int, int>>& ell() const { return ell_; }
  double divisor() const { return divisor_; }
  double floor() const { return floor_; }

 private:
  std::vector<std::pair<int, int>> ell_;
  double divisor_;
  double floor_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class JacobianDegenerate : public Error {
 public:
  using Error::Error;
};

class NormBlowup : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class BudgetOverflow : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// A step-level failure inside the KAM driver, tagged with the step index.
class StepError : public Error {
 public:
  StepError(int step, std::string kind, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step), kind_(std::move(kind)) {}
  int step() const { return step_; }
  // Name of the underlying error, e.g. "SmallDivisor".
  const std::string& kind() const { return kind_; }

 private:
  int step_;
  std::string kind_;
};

}  // namespace kgt
