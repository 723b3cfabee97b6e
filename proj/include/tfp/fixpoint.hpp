#pragma once

// Alternating common-fixed-point iteration for a pair of self-maps T1, T2 on
// a complete metric space:
//
//   u1 = T1(u0), u2 = T2(u1), u3 = T1(u2), ...
//
// Odd steps apply T1 and even steps apply T2. With a contraction constant
// alpha < 1 the sequence converges to the unique common fixed point z and
//
//   d(u_n, z) <= alpha^(n-1) / (1 - alpha) * d(u0, u1).

#include <cmath>
#include <concepts>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfp/errors.hpp"
#include "tfp/psi.hpp"

namespace tfp {

template <class S>
concept MetricSpace = requires(const S& s, const typename S::Point& p) {
  typename S::Point;
  { s.distance(p, p) } -> std::convertible_to<double>;
};

struct StoppingRule {
  double gap_tol = 1e-12;
  std::size_t max_iter = 500;
  std::optional<double> bound_tol;  // stop once the a-priori bound drops below this
};

enum class StopReason { gap_tol, max_iter, bound_tol };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::gap_tol: return "gap_tol";
    case StopReason::max_iter: return "max_iter";
    case StopReason::bound_tol: return "bound_tol";
  }
  return "?";
}

template <class P>
struct IterationTrace {
  std::vector<P> points;      // u0, u1, ..., uN
  std::vector<double> gaps;   // gaps[k-1] = d(u_{k-1}, u_k)
  std::vector<double> bounds; // bounds[k-1] = a-priori bound on d(u_k, z)
  double alpha = 0.0;
  StopReason stop_reason = StopReason::max_iter;

  std::size_t iterations() const { return gaps.size(); }
  const P& last() const { return points.back(); }
};

// Raised when max_iter is reached before any stopping criterion; carries
// everything computed so far.
template <class P>
class MaxIterationsExceeded : public Error {
 public:
  explicit MaxIterationsExceeded(IterationTrace<P> trace)
      : Error("maximum iterations (" + std::to_string(trace.iterations()) +
              ") reached before convergence"),
        trace_(std::move(trace)) {}
  const IterationTrace<P>& trace() const { return trace_; }

 private:
  IterationTrace<P> trace_;
};

// alpha^(n-1) * d01 / (1 - alpha), with 0^0 = 1.
inline double error_bound(double alpha, double d01, std::size_t n) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("error_bound: alpha must lie in [0, 1)");
  if (!(d01 >= 0.0)) throw InvalidArgument("error_bound: d01 must be nonnegative");
  if (n < 1) throw InvalidArgument("error_bound: n must be >= 1");
  const double factor = n == 1 ? 1.0 : std::pow(alpha, static_cast<double>(n - 1));
  return factor * d01 / (1.0 - alpha);
}

template <MetricSpace S, class Map1, class Map2>
IterationTrace<typename S::Point> iterate_pair(const S& space, Map1&& t1, Map2&& t2, double alpha,
                                               typename S::Point u0, const StoppingRule& stop) {
  using P = typename S::Point;
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("iterate_pair: alpha must lie in [0, 1)");
  if (stop.max_iter < 1) throw InvalidArgument("iterate_pair: max_iter must be >= 1");

  IterationTrace<P> trace;
  trace.alpha = alpha;
  trace.points.push_back(std::move(u0));

  for (std::size_t k = 1; k <= stop.max_iter; ++k) {
    const P& prev = trace.points.back();
    P next = [&]() -> P {
      try {
        return (k % 2 == 1) ? t1(prev) : t2(prev);
      } catch (const std::exception& e) {
        throw MapDomainError(k, e.what());
      }
    }();
    const double gap = space.distance(prev, next);
    trace.points.push_back(std::move(next));
    trace.gaps.push_back(gap);
    trace.bounds.push_back(error_bound(alpha, trace.gaps.front(), k));

    if (gap <= stop.gap_tol) {
      trace.stop_reason = StopReason::gap_tol;
      return trace;
    }
    if (stop.bound_tol && trace.bounds.back() <= *stop.bound_tol) {
      trace.stop_reason = StopReason::bound_tol;
      return trace;
    }
  }
  trace.stop_reason = StopReason::max_iter;
  throw MaxIterationsExceeded<P>(std::move(trace));
}

struct ContractionSample {
  double lhs = 0.0;  // d(T1 x, T2 y)
  double rhs = 0.0;  // psi(d(x,y), d(x,T1 x), d(y,T2 y))
  bool passed = false;
};

struct ContractionReport {
  std::vector<ContractionSample> samples;
  std::size_t passed = 0;
  std::optional<std::size_t> worst;  // index of the smallest rhs - lhs
  double worst_margin = 0.0;

  bool all_passed() const { return passed == samples.size(); }
};

// Checks the psi-contraction hypothesis on the given (x, y) pairs with an
// absolute slack of 1e-12.
template <MetricSpace S, class Map1, class Map2, class Pairs>
ContractionReport verify_contraction(const S& space, Map1&& t1, Map2&& t2, const PsiSpec& psi,
                                     const Pairs& sample_pairs) {
  ContractionReport report;
  for (const auto& [x, y] : sample_pairs) {
    const auto tx = t1(x);
    const auto ty = t2(y);
    ContractionSample s;
    s.lhs = space.distance(tx, ty);
    s.rhs = psi.eval(space.distance(x, y), space.distance(x, tx), space.distance(y, ty));
    s.passed = s.lhs <= s.rhs + 1e-12;
    if (s.passed) ++report.passed;
    const double margin = s.rhs - s.lhs;
    if (!report.worst || margin < report.worst_margin) {
      report.worst = report.samples.size();
      report.worst_margin = margin;
    }
    report.samples.push_back(s);
  }
  if (report.samples.empty()) throw InvalidArgument("verify_contraction: no sample pairs");
  return report;
}

}  // namespace tfp
