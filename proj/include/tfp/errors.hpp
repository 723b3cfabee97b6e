#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tfp {

// Root of every error raised by the library. Callers that only need a
// message can catch this; the CLI maps the concrete types to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

class NonHermitianInput : public Error {
 public:
  explicit NonHermitianInput(double asymmetry)
      : Error("matrix is not Hermitian (asymmetry " + std::to_string(asymmetry) + ")"),
        asymmetry_(asymmetry) {}
  double asymmetry() const { return asymmetry_; }

 private:
  double asymmetry_;
};

class NonFiniteInput : public Error {
 public:
  NonFiniteInput() : Error("matrix contains NaN or Inf entries") {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(double min_eig)
      : Error("matrix is not positive definite (smallest eigenvalue " +
              std::to_string(min_eig) + ")"),
        min_eig_(min_eig) {}
  double min_eig() const { return min_eig_; }

 private:
  double min_eig_;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NotInPsiAlpha : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A map handed to the fixed-point engine rejected an iterate.
class MapDomainError : public Error {
 public:
  MapDomainError(std::size_t step, const std::string& what)
      : Error("map rejected iterate at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace tfp
