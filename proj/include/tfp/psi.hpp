#pragma once

// Control functions psi(a, b, c) for the alternating contraction condition
//
//   d(T1 x, T2 y) <= psi(d(x, y), d(x, T1 x), d(y, T2 y)).
//
// A psi belongs to the class with constant alpha in [0, 1) when it is
// continuous and each of b <= psi(a, a, b), b <= psi(b, a, a),
// b <= psi(a, b, a) forces b <= alpha * a.

#include <optional>
#include <string>
#include <vector>

#include "tfp/errors.hpp"

namespace tfp {

enum class PsiKind { scaled_first, linear, scaled_max };

std::string to_string(PsiKind k);
PsiKind psi_kind_from_string(const std::string& s);  // throws InvalidArgument

class PsiSpec {
 public:
  // alpha * a
  static PsiSpec scaled_first(double alpha);
  // M a + N b + O c
  static PsiSpec linear(double m, double n, double o);
  // alpha * max{a, b, c}
  static PsiSpec scaled_max(double alpha);

  // Validating factory used by deserialization. Throws NotInPsiAlpha.
  static PsiSpec make(PsiKind kind, std::vector<double> params);

  // Skips the class invariants. Only for probing the membership check with
  // specs known to lie outside the class.
  static PsiSpec unchecked(PsiKind kind, std::vector<double> params);

  PsiKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }

  double eval(double a, double b, double c) const;

  // Contraction constant certified by the three implication branches.
  // Throws NotInPsiAlpha when it is not below 1.
  double alpha_effective() const;

  // Same formula without the < 1 gate.
  double raw_alpha() const;

  friend bool operator==(const PsiSpec&, const PsiSpec&) = default;

 private:
  PsiSpec(PsiKind k, std::vector<double> p) : kind_(k), params_(std::move(p)) {}

  PsiKind kind_ = PsiKind::scaled_first;
  std::vector<double> params_;
};

struct MembershipCounterexample {
  double a;
  double b;
  int branch;  // 1: psi(a,a,b), 2: psi(b,a,a), 3: psi(a,b,a)
};

struct MembershipReport {
  bool member = false;
  double alpha = 0.0;
  std::size_t points_checked = 0;
  std::optional<MembershipCounterexample> counterexample;
};

// Grid check over log-spaced (a, b) in [lo, hi]^2.
MembershipReport check_membership(const PsiSpec& psi, std::size_t grid_size = 64, double lo = 1e-6,
                                  double hi = 1e3);

inline bool validate_membership(const PsiSpec& psi, std::size_t grid_size = 64) {
  return check_membership(psi, grid_size).member;
}

}  // namespace tfp
