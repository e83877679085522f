#pragma once

#include <stdexcept>
#include <string>

namespace toepricc {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix was constructed from non-finite entries or with mismatched
/// dimensions.
class InvalidMatrix : public Error {
 public:
  using Error::Error;
};

/// A linear solve met a pivot below the relative threshold.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel (QR eigenvalue iteration, Jacobi SVD) exhausted its
/// step budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A realization failed dimensional or stability validation.
class InvalidRealization : public Error {
 public:
  using Error::Error;
};

/// The symbol was evaluated at (or numerically at) one of its poles.
class PoleAtEvaluationPoint : public Error {
 public:
  using Error::Error;
};

/// Variable substitution z -> rz was requested with a radius outside the
/// admissible interval.
class InvalidScaling : public Error {
 public:
  using Error::Error;
};

/// The Riccati pivot R0 - gamma*Q*B became singular during iteration.
class PivotSingular : public Error {
 public:
  using Error::Error;
};

/// A finite Toeplitz section that had to be inverted was singular.
class SectionSingular : public Error {
 public:
  using Error::Error;
};

/// A factorization was requested from Riccati data that is not stabilizing.
class NotStabilizing : public Error {
 public:
  using Error::Error;
};

/// The symbol has (numerically) a zero on the unit circle, so the operator
/// is not Fredholm and the analysis cannot proceed.
class ZeroOnCircle : public Error {
 public:
  using Error::Error;
};

/// Malformed input: file parse failure, schema violation, or a realization
/// that fails validation at the tool boundary.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace toepricc
