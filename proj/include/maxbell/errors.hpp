#pragma once

#include <stdexcept>
#include <string>

namespace maxbell {

enum class ErrorKind {
  kDomain,
  kStructural,
  kMeasure,
  kIntegrability,
  kConvergence,
  kDivergence,
  kNotApStar,
  kDegenerateConstants,
  kTailCondition,
  kInstanceTooLarge,
  kFit,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error thrown by the library. The kind lets callers (the CLI
/// in particular) map failures to exit codes without a cascade of catches.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::kDomain, what) {}
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what) : Error(ErrorKind::kStructural, what) {}
};

class MeasureError : public Error {
 public:
  explicit MeasureError(const std::string& what) : Error(ErrorKind::kMeasure, what) {}
};

class IntegrabilityError : public Error {
 public:
  explicit IntegrabilityError(const std::string& what)
      : Error(ErrorKind::kIntegrability, what) {}
};

/// Quadrature gave up; carries the best estimate reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_estimate)
      : Error(ErrorKind::kConvergence, what),
        estimate_(estimate),
        error_estimate_(error_estimate) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::kDivergence, what) {}
};

class NotApStarError : public Error {
 public:
  explicit NotApStarError(const std::string& what) : Error(ErrorKind::kNotApStar, what) {}
};

class DegenerateConstantsError : public Error {
 public:
  explicit DegenerateConstantsError(const std::string& what)
      : Error(ErrorKind::kDegenerateConstants, what) {}
};

class TailConditionError : public Error {
 public:
  explicit TailConditionError(const std::string& what)
      : Error(ErrorKind::kTailCondition, what) {}
};

class InstanceTooLargeError : public Error {
 public:
  explicit InstanceTooLargeError(const std::string& what)
      : Error(ErrorKind::kInstanceTooLarge, what) {}
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error(ErrorKind::kFit, what) {}
};

}  // namespace maxbell
