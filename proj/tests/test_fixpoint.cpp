#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "tfp/fixpoint.hpp"
#include "tfp/hpd.hpp"

using namespace tfp;

namespace {

struct RealLine {
  using Point = double;
  double distance(double a, double b) const { return std::abs(a - b); }
};

static_assert(MetricSpace<RealLine>);

double quarter(double x) { return x / 4.0; }
double fifth(double x) { return x / 5.0; }

// Independent simulation of the alternating scheme.
std::vector<double> brute_force(double u0, std::size_t steps) {
  std::vector<double> u{u0};
  for (std::size_t k = 1; k <= steps; ++k) u.push_back(k % 2 ? u.back() / 4.0 : u.back() / 5.0);
  return u;
}

std::vector<std::pair<double, double>> sample_pairs(std::size_t count, std::uint64_t seed) {
  // Deterministic pairs in [-10, 10]^2 from the library's Gaussian stream.
  const std::size_t n = static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * count)));
  const Matrix g = random_gaussian_matrix(n, seed);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < count; ++i) {
    const Complex z = g.data()[i];
    out.emplace_back(std::clamp(3.0 * z.real(), -10.0, 10.0), std::clamp(3.0 * z.imag(), -10.0, 10.0));
  }
  return out;
}

}  // namespace

TEST_CASE("constant maps reach the constant after one step") {
  const auto c = [](double) { return 3.0; };
  const auto trace = iterate_pair(RealLine{}, c, c, 0.0, -7.0, StoppingRule{});
  REQUIRE(trace.points.size() >= 2);
  CHECK(trace.points[1] == 3.0);
  CHECK(trace.last() == 3.0);
  CHECK(trace.stop_reason == StopReason::gap_tol);
  CHECK(trace.iterations() == 2);
  CHECK(trace.gaps == std::vector<double>{10.0, 0.0});
}

TEST_CASE("halving maps give a geometric sequence") {
  const auto half = [](double x) { return x / 2.0; };
  const auto trace = iterate_pair(RealLine{}, half, half, 0.5, 1.0, StoppingRule{});
  CHECK(trace.stop_reason == StopReason::gap_tol);
  for (std::size_t k = 0; k < trace.points.size(); ++k) CHECK(trace.points[k] == std::ldexp(1.0, -static_cast<int>(k)));
  CHECK(trace.gaps.size() == trace.points.size() - 1);
  for (std::size_t n = 1; n <= trace.iterations(); ++n) {
    CHECK(std::abs(trace.points[n]) <= std::ldexp(1.0, -static_cast<int>(n - 1)) + 1e-15);
    CHECK(std::abs(trace.points[n]) <= trace.bounds[n - 1] + 1e-15);
  }
}

TEST_CASE("odd steps apply T1 and even steps apply T2") {
  const auto t1 = [](double x) { return 10.0 * x + 1.0; };
  const auto t2 = [](double x) { return 10.0 * x + 2.0; };
  StoppingRule stop;
  stop.max_iter = 4;
  try {
    iterate_pair(RealLine{}, t1, t2, 0.5, 0.0, stop);
    FAIL("expected MaxIterationsExceeded");
  } catch (const MaxIterationsExceeded<double>& e) {
    CHECK(e.trace().points == std::vector<double>{0.0, 1.0, 12.0, 121.0, 1212.0});
    CHECK(e.trace().stop_reason == StopReason::max_iter);
    CHECK(e.trace().iterations() == 4);
  }
}

TEST_CASE("scalar toy matches brute-force iteration") {
  const double alpha = PsiSpec::linear(0.0, 1.0 / 3.0, 0.25).alpha_effective();
  for (double u0 : {1.0, -3.0, 1e6, 0.125}) {
    const auto trace = iterate_pair(RealLine{}, quarter, fifth, alpha, u0, StoppingRule{});
    const auto oracle = brute_force(u0, trace.iterations());
    REQUIRE(oracle.size() == trace.points.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(std::abs(trace.points[k] - oracle[k]) <= 1e-14);
    // The common fixed point is 0.
    for (std::size_t n = 1; n <= trace.iterations(); ++n)
      CHECK(std::abs(trace.points[n]) <= error_bound(alpha, trace.gaps.front(), n) + 1e-15);
  }
}

TEST_CASE("scalar toy satisfies the psi contraction") {
  const PsiSpec psi = PsiSpec::linear(0.0, 1.0 / 3.0, 0.25);
  const auto pairs = sample_pairs(1000, 2024);
  const auto report = verify_contraction(RealLine{}, quarter, fifth, psi, pairs);
  CHECK(report.samples.size() == 1000);
  CHECK(report.all_passed());
  CHECK(report.worst_margin >= -1e-12);
}

TEST_CASE("verify_contraction passes trivially for constant maps") {
  const auto c = [](double) { return 1.5; };
  const auto report = verify_contraction(RealLine{}, c, c, PsiSpec::scaled_first(0.0), sample_pairs(50, 1));
  CHECK(report.all_passed());
  for (const auto& s : report.samples) CHECK(s.lhs == 0.0);
}

TEST_CASE("verify_contraction reports a violating witness") {
  const auto twice = [](double x) { return 2.0 * x; };
  const auto same = [](double x) { return x; };
  const std::vector<std::pair<double, double>> pairs{{0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}};
  const auto report = verify_contraction(RealLine{}, twice, same, PsiSpec::scaled_first(0.9), pairs);
  CHECK_FALSE(report.all_passed());
  CHECK(report.passed == 1);
  REQUIRE(report.worst);
  CHECK(*report.worst == 1);
  CHECK(report.samples[1].lhs == 1.0);
  CHECK(report.samples[1].rhs == 0.0);
  CHECK(report.worst_margin == -1.0);

  CHECK_THROWS_AS(verify_contraction(RealLine{}, twice, same, PsiSpec::scaled_first(0.9),
                                     std::vector<std::pair<double, double>>{}),
                  InvalidArgument);
}

TEST_CASE("error_bound") {
  CHECK(error_bound(0.0, 3.0, 1) == 3.0);
  CHECK(error_bound(0.0, 3.0, 2) == 0.0);
  CHECK(error_bound(0.0, 3.0, 7) == 0.0);
  CHECK(error_bound(0.5, 0.5, 3) == 0.25);
  CHECK(error_bound(0.5, 0.5, 1) == 1.0);
  for (double alpha : {0.1, 0.5, 0.75, 0.99})
    for (std::size_t n = 1; n < 30; ++n)
      CHECK(error_bound(alpha, 2.0, n + 1) == doctest::Approx(alpha * error_bound(alpha, 2.0, n)).epsilon(1e-14));
  CHECK_THROWS_AS(error_bound(1.0, 1.0, 2), InvalidArgument);
  CHECK_THROWS_AS(error_bound(0.5, -1.0, 2), InvalidArgument);
  CHECK_THROWS_AS(error_bound(0.5, 1.0, 0), InvalidArgument);
}

TEST_CASE("bounds are nonincreasing along a trace") {
  const auto trace = iterate_pair(RealLine{}, quarter, fifth, 7.0 / 12.0, 5.0, StoppingRule{});
  for (std::size_t k = 1; k < trace.bounds.size(); ++k) CHECK(trace.bounds[k] <= trace.bounds[k - 1]);
}

TEST_CASE("gaps contract by alpha") {
  const double alpha = 7.0 / 12.0;
  const auto trace = iterate_pair(RealLine{}, quarter, fifth, alpha, -42.0, StoppingRule{});
  for (std::size_t k = 1; k < trace.gaps.size(); ++k) CHECK(trace.gaps[k] <= alpha * trace.gaps[k - 1] + 1e-12);
}

TEST_CASE("swapping the maps reaches the same fixed point") {
  const auto t1 = [](double x) { return x / 3.0 + 2.0; };  // both fix x = 3
  const auto t2 = [](double x) { return 0.5 * x + 1.5; };
  const auto ab = iterate_pair(RealLine{}, t1, t2, 0.5, 100.0, StoppingRule{});
  const auto ba = iterate_pair(RealLine{}, t2, t1, 0.5, 100.0, StoppingRule{});
  CHECK(std::abs(ab.last() - 3.0) <= 1e-9);
  CHECK(std::abs(ab.last() - ba.last()) <= 1e-9);
}

TEST_CASE("stopping rules") {
  StoppingRule by_bound;
  by_bound.bound_tol = 1e-3;
  const auto t = iterate_pair(RealLine{}, quarter, fifth, 0.5, 1.0, by_bound);
  CHECK(t.stop_reason == StopReason::bound_tol);
  CHECK(t.bounds.back() <= 1e-3);
  CHECK(t.bounds[t.bounds.size() - 2] > 1e-3);

  const auto step = [](double x) { return x + 1.0; };
  StoppingRule short_run;
  short_run.max_iter = 10;
  try {
    iterate_pair(RealLine{}, step, step, 0.5, 0.0, short_run);
    FAIL("expected MaxIterationsExceeded");
  } catch (const MaxIterationsExceeded<double>& e) {
    CHECK(e.trace().iterations() == 10);
    CHECK(e.trace().last() == 10.0);
  }

  CHECK_THROWS_AS(iterate_pair(RealLine{}, step, step, 1.0, 0.0, StoppingRule{}), InvalidArgument);
  StoppingRule zero;
  zero.max_iter = 0;
  CHECK_THROWS_AS(iterate_pair(RealLine{}, step, step, 0.5, 0.0, zero), InvalidArgument);
}

TEST_CASE("map failures surface as MapDomainError with the step") {
  const auto fine = [](double x) { return x / 2.0; };
  const auto picky = [](double x) -> double {
    if (x < 0.3) throw std::domain_error("too small");
    return x / 2.0;
  };
  try {
    iterate_pair(RealLine{}, fine, picky, 0.5, 1.0, StoppingRule{});
    FAIL("expected MapDomainError");
  } catch (const MapDomainError& e) {
    // u1 = 0.5, u2 = 0.25, u3 = 0.125, step 4 applies T2 to 0.125.
    CHECK(e.step() == 4);
    CHECK(std::string(e.what()).find("too small") != std::string::npos);
  }
}
