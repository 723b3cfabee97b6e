#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "tfp/thompson.hpp"

using namespace tfp;

namespace {

double d(const PDMatrix& a, const PDMatrix& b) { return distance(a, b).value(); }

PDMatrix inverse(const PDMatrix& p) { return matrix_power(p, -1.0); }

PDMatrix sum(const PDMatrix& a, const PDMatrix& b) { return PDMatrix(add(a, b)); }

std::size_t dim_for(std::uint64_t seed) { return 2 + seed % 3; }

}  // namespace

TEST_CASE("w_ratio examples") {
  CHECK(w_ratio(PDMatrix::identity(3), PDMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w_ratio(PDMatrix::diagonal({2.0, 2.0}), PDMatrix::identity(2)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(w_ratio(PDMatrix::diagonal({1.0, 4.0}), PDMatrix::diagonal({2.0, 1.0})) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(w_ratio(PDMatrix::identity(2), PDMatrix::identity(3)), DimensionMismatch);
}

TEST_CASE("distance examples") {
  const PDMatrix a = test::random_pd(3, 1);
  CHECK(d(a, a) <= kThompsonEqualityTolerance);
  CHECK(d(PDMatrix::diagonal({2.0, 2.0, 2.0}), PDMatrix::identity(3)) ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  CHECK(d(PDMatrix::diagonal({1.0, 4.0}), PDMatrix::diagonal({2.0, 1.0})) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(distance(PDMatrix::identity(2), PDMatrix::identity(3)), DimensionMismatch);
}

TEST_CASE("ThompsonDistance is nonnegative and ordered") {
  CHECK(ThompsonDistance(-1e-17).value() == 0.0);
  CHECK(ThompsonDistance(0.5) < ThompsonDistance(0.6));
  CHECK(ThompsonDistance(0.5) == ThompsonDistance(0.5));
}

TEST_CASE("metric axioms") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = dim_for(seed);
    const PDMatrix a = test::random_pd(n, 3 * seed);
    const PDMatrix b = test::random_pd(n, 3 * seed + 1);
    const PDMatrix c = test::random_pd(n, 3 * seed + 2);
    CAPTURE(seed);
    CHECK(d(a, b) == d(b, a));
    CHECK(d(a, b) > kThompsonEqualityTolerance);
    CHECK(d(a, a) <= kThompsonEqualityTolerance);
    CHECK(d(a, c) <= d(a, b) + d(b, c) + 1e-9);
  }
}

TEST_CASE("inversion and congruence invariance") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = dim_for(seed);
    const PDMatrix a = test::random_pd(n, 2 * seed);
    const PDMatrix b = test::random_pd(n, 2 * seed + 1);
    const Matrix m = test::random_nonsingular(n, seed + 7000);
    const double base = d(a, b);
    CAPTURE(seed);
    CHECK(std::abs(d(inverse(a), inverse(b)) - base) <= 1e-9);
    // M A M* is the congruence by M*.
    const PDMatrix ma(congruence(m.adjoint(), a));
    const PDMatrix mb(congruence(m.adjoint(), b));
    CHECK(std::abs(d(ma, mb) - base) <= 1e-9);
  }
}

TEST_CASE("powers contract by |r|") {
  const double rs[] = {-1.0, -0.5, 1.0 / 3.0, 0.5, 1.0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = dim_for(seed);
    const PDMatrix a = test::random_pd(n, 2 * seed + 300);
    const PDMatrix b = test::random_pd(n, 2 * seed + 301);
    const double base = d(a, b);
    for (double r : rs) {
      CAPTURE(r);
      CHECK(d(matrix_power(a, r), matrix_power(b, r)) <= std::abs(r) * base + 1e-9);
    }
  }
}

TEST_CASE("sums are nonexpansive") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = dim_for(seed);
    const PDMatrix a = test::random_pd(n, 4 * seed + 600);
    const PDMatrix b = test::random_pd(n, 4 * seed + 601);
    const PDMatrix c = test::random_pd(n, 4 * seed + 602);
    const PDMatrix e = test::random_pd(n, 4 * seed + 603);
    CAPTURE(seed);
    CHECK(d(sum(a, b), sum(c, e)) <= std::max(d(a, c), d(b, e)) + 1e-9);
    CHECK(d(sum(a, b), sum(a, e)) <= d(b, e) + 1e-9);
  }
}

TEST_CASE("diagonal closed form") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = dim_for(seed);
    const Matrix ga = random_gaussian_matrix(n, seed + 40000);
    const Matrix gb = random_gaussian_matrix(n, seed + 50000);
    std::vector<double> da(n), db(n);
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      da[i] = std::exp(ga(i, i).real());
      db[i] = std::exp(gb(i, i).real());
      expected = std::max(expected, std::abs(std::log(da[i] / db[i])));
    }
    CHECK(std::abs(d(PDMatrix::diagonal(da), PDMatrix::diagonal(db)) - expected) <= 1e-12);
  }
}

TEST_CASE("scaling by e^t moves distance by |t|") {
  const PDMatrix a = test::random_pd(3, 99);
  for (double t : {-2.0, -0.3, 0.1, 1.7}) {
    const PDMatrix scaled(scale(std::exp(t), a));
    CHECK(d(a, scaled) == doctest::Approx(std::abs(t)).epsilon(1e-11));
  }
}

TEST_CASE("ThompsonSpace adaptor") {
  const ThompsonSpace space;
  const PDMatrix a = test::random_pd(2, 1), b = test::random_pd(2, 2);
  CHECK(space.distance(a, b) == d(a, b));
}
