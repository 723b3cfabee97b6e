#pragma once

// Thompson part metric on the cone of positive definite matrices:
//
//   d(A, B) = max{ log W(A/B), log W(B/A) },   W(A/B) = lambda_max(B^-1/2 A B^-1/2).
//
// The metric is invariant under inversion and congruence, and contracts
// matrix powers by |r|.

#include "tfp/hpd.hpp"

namespace tfp {

class ThompsonDistance {
 public:
  constexpr ThompsonDistance() = default;
  constexpr explicit ThompsonDistance(double v) : value_(v < 0.0 ? 0.0 : v) {}
  constexpr double value() const { return value_; }
  friend constexpr auto operator<=>(const ThompsonDistance&, const ThompsonDistance&) = default;

 private:
  double value_ = 0.0;
};

// Distances at or below this are treated as "the same point".
inline constexpr double kThompsonEqualityTolerance = 1e-10;

// W(A/B) = inf{delta > 0 : A <= delta B}.
double w_ratio(const PDMatrix& a, const PDMatrix& b);

ThompsonDistance distance(const PDMatrix& a, const PDMatrix& b);

// Metric-space adaptor for the fixed-point engine.
struct ThompsonSpace {
  using Point = PDMatrix;
  double distance(const PDMatrix& a, const PDMatrix& b) const { return tfp::distance(a, b).value(); }
};

}  // namespace tfp
