#include "tfp/thompson.hpp"

#include <algorithm>
#include <cmath>

namespace tfp {

double w_ratio(const PDMatrix& a, const PDMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(b.dim(), a.dim());
  const PDMatrix b_inv_sqrt = matrix_power(b, -0.5);
  return eig_hermitian(congruence(b_inv_sqrt.matrix(), a)).max();
}

ThompsonDistance distance(const PDMatrix& a, const PDMatrix& b) {
  const double forward = std::log(w_ratio(a, b));
  const double backward = std::log(w_ratio(b, a));
  return ThompsonDistance(std::max(forward, backward));
}

}  // namespace tfp
