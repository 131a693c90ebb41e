#pragma once

#include <stdexcept>
#include <string>

namespace ssalt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The step-stress design violates one of its invariants.
class DesignError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the requested computation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Count data without a failure for some (risk, stress level) combination.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

/// J_beta is numerically singular at the evaluated parameters.
class SingularInformationError : public Error {
 public:
  SingularInformationError(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// The minimizer stopped before the estimating equations were solved.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, int iterations, double gradient_norm)
      : Error(what), iterations_(iterations), gradient_norm_(gradient_norm) {}

  int iterations() const noexcept { return iterations_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  int iterations_;
  double gradient_norm_;
};

/// A logit/log transform was requested at a boundary value.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Simulation kept producing ill-posed data sets.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& message)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Too many Monte Carlo replicates failed.
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssalt
