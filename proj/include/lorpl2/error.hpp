#pragma once

#include <stdexcept>
#include <string>

namespace lorpl2 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or malformed inputs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class WindowExceeded : public Error {
 public:
  WindowExceeded(int i, int j, int window)
      : Error("moment (" + std::to_string(i) + "," + std::to_string(j) +
              ") outside provider window " + std::to_string(window)),
        i_(i), j_(j), window_(window) {}
  int i() const { return i_; }
  int j() const { return j_; }
  int window() const { return window_; }

 private:
  int i_, j_, window_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Base for failures of the numerics rather than of the inputs' shape.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double achieved)
      : NumericalError(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

class NotPositiveDefinite : public NumericalError {
 public:
  NotPositiveDefinite(const std::string& what, int level)
      : NumericalError(what), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

class AxisEvaluation : public Error {
 public:
  AxisEvaluation() : Error("evaluation point lies on a coordinate axis") {}
};

class DegenerateDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A Favard hypothesis that the recurrence data does not satisfy.
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& condition, const std::string& detail)
      : Error(condition + ": " + detail), condition_(condition) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

}  // namespace lorpl2
