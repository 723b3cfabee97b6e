#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "tfp/hpd.hpp"

namespace tfp::test {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

inline HermitianMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  const Matrix g = random_gaussian_matrix(n, seed);
  return HermitianMatrix(symmetrized(g + g.adjoint()));
}

// PD matrix with condition number bounded by e^(2 radius).
inline PDMatrix random_pd(std::size_t n, std::uint64_t seed, double radius = 2.0) {
  return random_pd_in_ball(n, radius, seed);
}

// Shifted Gaussian, so it is comfortably nonsingular.
inline Matrix random_nonsingular(std::size_t n, std::uint64_t seed) {
  return random_gaussian_matrix(n, seed) + Complex(3.0 * static_cast<double>(n)) * Matrix::identity(n);
}

}  // namespace tfp::test
