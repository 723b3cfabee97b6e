#pragma once

// Dense complex Hermitian / positive definite matrix algebra.
//
// Matrices are small (n up to a few hundred) and stored row-major in a flat
// vector. Every operation that is algebraically Hermitian re-symmetrizes its
// output, M <- (M + M*)/2, so rounding drift cannot accumulate over long
// iterations.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "tfp/errors.hpp"

namespace tfp {

using Complex = std::complex<double>;

// General square complex matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n) {}
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t dim() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const Complex> data() const { return a_; }

  Matrix adjoint() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(Complex c);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Complex c, Matrix a) { return a *= c; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

double frobenius_norm(const Matrix& m);

// Largest entrywise |M(i,j) - conj(M(j,i))|, including the imaginary part
// of the diagonal.
double hermitian_asymmetry(const Matrix& m);

// (M + M*)/2 with an exactly real diagonal.
Matrix symmetrized(const Matrix& m);

// A matrix validated against conjugate-transpose symmetry within
// 1e-12 * max(1, ||M||_F) and re-symmetrized on construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Matrix& m);

  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix diagonal(std::span<const double> d);
  static HermitianMatrix diagonal(std::initializer_list<double> d);

  std::size_t dim() const { return m_.dim(); }
  const Matrix& matrix() const { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  struct Trusted {};
  HermitianMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  friend HermitianMatrix make_hermitian_unchecked(Matrix m);

  Matrix m_;
};

// Symmetrizes without the tolerance check. For results that are Hermitian
// by algebra (sums, congruences, spectral reconstructions).
HermitianMatrix make_hermitian_unchecked(Matrix m);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix vectors;                   // orthonormal columns

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

// Cyclic Jacobi. Throws ConvergenceFailure if the sweep budget (30 n^2) is
// exhausted before the off-diagonal mass drops below 1e-14 ||M||_F.
EigenDecomposition eig_hermitian(const HermitianMatrix& m);

// Relative positive-definiteness floor n * eps * lambda_max.
double pd_floor(std::size_t n, double lambda_max);

struct DefinitenessResult {
  bool positive_definite;
  double min_eig;
};

DefinitenessResult is_positive_definite(const HermitianMatrix& m);

// A Hermitian matrix certified positive definite, with its smallest
// eigenvalue cached.
class PDMatrix {
 public:
  PDMatrix() = default;
  // Throws NotPositiveDefinite when the certification fails.
  explicit PDMatrix(HermitianMatrix h);

  static PDMatrix identity(std::size_t n);
  static PDMatrix diagonal(std::initializer_list<double> d);
  static PDMatrix diagonal(std::span<const double> d);

  std::size_t dim() const { return h_.dim(); }
  double min_eig() const { return min_eig_; }
  const HermitianMatrix& hermitian() const { return h_; }
  const Matrix& matrix() const { return h_.matrix(); }
  const Complex& operator()(std::size_t i, std::size_t j) const { return h_(i, j); }

  operator const HermitianMatrix&() const { return h_; }  // NOLINT

  friend bool operator==(const PDMatrix& a, const PDMatrix& b) { return a.h_ == b.h_; }

 private:
  friend PDMatrix spectral_function_pd(const EigenDecomposition&, double);
  PDMatrix(HermitianMatrix h, double min_eig) : h_(std::move(h)), min_eig_(min_eig) {}

  HermitianMatrix h_;
  double min_eig_ = 0.0;
};

// V diag(lambda_i^p) V*. Any finite nonzero real exponent.
PDMatrix matrix_power(const PDMatrix& p, double exponent);

// Certifies a Hermitian matrix as PD and raises it to a power using a single
// eigendecomposition. Throws NotPositiveDefinite.
PDMatrix matrix_power(const HermitianMatrix& h, double exponent);

// Builds V diag(lambda_i^p) V* from an existing decomposition whose
// eigenvalues are already known to be positive.
PDMatrix spectral_function_pd(const EigenDecomposition& e, double exponent);

// A* M A.
HermitianMatrix congruence(const Matrix& a, const HermitianMatrix& m);

HermitianMatrix add(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix subtract(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix scale(double c, const HermitianMatrix& m);

// Seeded Gaussian / unitary / Thompson-ball sampling. Deterministic for a
// fixed seed on every platform (no std distributions involved).
Matrix random_gaussian_matrix(std::size_t n, std::uint64_t seed);
Matrix random_unitary(std::size_t n, std::uint64_t seed);
PDMatrix random_pd_in_ball(std::size_t n, double radius, std::uint64_t seed);

// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace tfp
