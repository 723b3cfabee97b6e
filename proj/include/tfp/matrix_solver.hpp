#pragma once

// Common positive definite solutions of paired nonlinear matrix equations.
//
// type1:  X^s = Q1 + sum_i A_i* F(X) A_i,   X^s = Q2 + sum_i A_i* G(X) A_i
//         A_i nonsingular, 0 < l < s, contraction constant l/s.
// type2:  X^r = sum_i A_i* F(X) A_i,        X^s = sum_i A_i* G(X) A_i
//         A_i unitary, 3l < rs/(r+s), contraction constant 3l(1/r + 1/s).
//
// Each equation becomes a self-map on a Thompson ball around the identity
// (T1 from the first equation, T2 from the second) and the pair is driven
// to its common fixed point by the alternating engine.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfp/fixpoint.hpp"
#include "tfp/hpd.hpp"
#include "tfp/thompson.hpp"

namespace tfp {

class InvalidProblem : public InvalidArgument {
 public:
  InvalidProblem(std::string key, const std::string& what)
      : InvalidArgument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct MatrixFunctionSpec {
  enum class Kind { power, constant };

  static MatrixFunctionSpec power(double exponent);
  static MatrixFunctionSpec constant(PDMatrix value);

  Kind kind = Kind::power;
  double exponent = 1.0;          // power
  std::optional<PDMatrix> value;  // constant

  friend bool operator==(const MatrixFunctionSpec&, const MatrixFunctionSpec&) = default;
};

PDMatrix apply_F(const MatrixFunctionSpec& spec, const PDMatrix& x);

enum class ProblemKind { type1, type2 };

// proof:       ball {X : d(X, I) <= a}        (r*a for type2)
// exponential: ball {X : d(X, I) <= e^a}      (e^(r*a) for type2)
enum class BallConvention { proof, exponential };

std::string to_string(ProblemKind k);
std::string to_string(BallConvention b);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::type1;
  std::vector<Matrix> A;
  std::optional<PDMatrix> Q1, Q2;  // type1 only
  double s = 2.0;
  std::optional<double> r;  // type2 only
  MatrixFunctionSpec F, G;
  double a = 0.0;
  double l = 1.0;
  BallConvention ball = BallConvention::proof;

  std::size_t n() const { return A.empty() ? 0 : A.front().dim(); }
  std::size_t m() const { return A.size(); }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

// Throws InvalidProblem naming the offending field.
void validate(const ProblemSpec& problem);

// l/s (type1) or 3l(1/r + 1/s) (type2).
double contraction_constant(const ProblemSpec& problem);

double ball_radius(const ProblemSpec& problem);

using MatrixMap = std::function<PDMatrix(const PDMatrix&)>;

// X -> (Q + sum_i A_i* F(X) A_i)^(1/s)
MatrixMap build_map_type1(PDMatrix q, std::vector<Matrix> a, MatrixFunctionSpec f, double s);

// X -> (sum_i A_i* F(X) A_i)^(1/rho)
MatrixMap build_map_type2(std::vector<Matrix> a, MatrixFunctionSpec f, double rho);

// (T1, T2) for the problem.
std::pair<MatrixMap, MatrixMap> build_maps(const ProblemSpec& problem);

struct Residuals {
  double first = 0.0;
  double second = 0.0;
};

// ||X^e - RHS(X)||_F / max(1, ||X^e||_F) for both equations.
Residuals residuals(const ProblemSpec& problem, const PDMatrix& x);

// --- Sufficiency conditions -------------------------------------------------

struct ConditionWitness {
  std::size_t sample = 0;
  std::string inequality;  // which inequality of the condition failed
  PDMatrix x, y;
  double lhs = 0.0;
  double rhs = 0.0;

  friend bool operator==(const ConditionWitness&, const ConditionWitness&) = default;
};

struct ConditionResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t passed = 0;
  double worst_margin = 0.0;  // min over samples and inequalities of rhs - lhs
  std::optional<ConditionWitness> witness;  // first sample attaining the worst margin when it fails

  bool ok() const { return passed == checked; }
  friend bool operator==(const ConditionResult&, const ConditionResult&) = default;
};

struct ConditionReport {
  ProblemKind kind = ProblemKind::type1;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double radius = 0.0;
  std::vector<ConditionResult> conditions;   // decide pass/fail
  std::vector<ConditionResult> diagnostics;  // informational only

  bool all_passed() const;
  friend bool operator==(const ConditionReport&, const ConditionReport&) = default;
};

struct CheckOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

// Sample pair i uses X = random_pd_in_ball(n, R, derive_seed(seed, 2i)) and
// Y = random_pd_in_ball(n, R, derive_seed(seed, 2i+1)), so reports do not
// depend on the thread count.
ConditionReport check_conditions_type1(const ProblemSpec& problem, const CheckOptions& options);
ConditionReport check_conditions_type2(const ProblemSpec& problem, const CheckOptions& options);
ConditionReport check_conditions(const ProblemSpec& problem, const CheckOptions& options);

// The inequality slack used by the checkers.
inline bool holds_with_slack(double lhs, double rhs) { return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)); }

// --- Solving ----------------------------------------------------------------

struct SolveOptions {
  double gap_tol = 1e-12;
  double residual_tol = 1e-10;
  std::size_t max_iter = 500;
  bool force = false;
  CheckOptions check;
};

struct StepRecord {
  double residual1 = 0.0;
  double residual2 = 0.0;
  double dist_to_identity = 0.0;
};

struct SolveResult {
  PDMatrix solution;
  IterationTrace<PDMatrix> trace;
  std::vector<StepRecord> steps;  // steps[k-1] describes u_k
  double residual1 = 0.0;
  double residual2 = 0.0;
  double dist_to_identity = 0.0;
  double alpha_used = 0.0;
  std::optional<ConditionReport> conditions;
};

class X0DomainError : public Error {
 public:
  X0DomainError(double dist, double radius)
      : Error("initial point lies outside the Thompson ball: d(X0, I) = " + std::to_string(dist) +
              " > " + std::to_string(radius)),
        distance_(dist),
        radius_(radius) {}
  double distance() const { return distance_; }
  double radius() const { return radius_; }

 private:
  double distance_, radius_;
};

class ConditionsNotVerified : public Error {
 public:
  explicit ConditionsNotVerified(ConditionReport report)
      : Error("sufficiency conditions failed on sampled points (use force to solve anyway)"),
        report_(std::move(report)) {}
  const ConditionReport& report() const { return report_; }

 private:
  ConditionReport report_;
};

// The iteration did not produce a residual-certified solution. The partial
// result (trace, last iterate, residuals) is attached.
class SolveIncomplete : public Error {
 public:
  SolveIncomplete(const std::string& what, SolveResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const SolveResult& partial() const { return partial_; }

 private:
  SolveResult partial_;
};

class SolveMaxIterationsExceeded : public SolveIncomplete {
 public:
  using SolveIncomplete::SolveIncomplete;
};

class ResidualNotCertified : public SolveIncomplete {
 public:
  using SolveIncomplete::SolveIncomplete;
};

SolveResult solve(const ProblemSpec& problem, const PDMatrix& x0, const SolveOptions& options = {});

}  // namespace tfp
