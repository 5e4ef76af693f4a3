#pragma once

#include <stdexcept>
#include <string>

namespace ypcap {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// EOS query outside the tabulated (or physically admissible) domain.
class OutOfTableRange : public Error {
 public:
  using Error::Error;
};

/// EOS table failed a monotonicity or shape check at load time.
class NonMonotoneColumn : public Error {
 public:
  using Error::Error;
};

class NonPositiveModulus : public Error {
 public:
  using Error::Error;
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

/// Radial return asked to preserve the direction of a zero deviator.
class ZeroDeviatorReturn : public Error {
 public:
  using Error::Error;
};

/// Cap return mapping did not converge; drivers should cut the step.
class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual, const std::string& what)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Converged plastic multiplier is negative: the trial locus was misclassified.
class NegativeDlambda : public Error {
 public:
  explicit NegativeDlambda(double dlambda)
      : Error("cap return converged to a negative plastic multiplier"), dlambda_(dlambda) {}
  double dlambda() const { return dlambda_; }

 private:
  double dlambda_;
};

class MeshTangled : public Error {
 public:
  using Error::Error;
};

class LateralControlFailure : public Error {
 public:
  using Error::Error;
};

/// Parameter set or config violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error(format(line, column, msg)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(int line, int column, const std::string& msg) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
  }
  int line_;
  int column_;
};

}  // namespace ypcap
