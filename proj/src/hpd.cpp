#include "tfp/hpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

namespace tfp {

namespace {

void require_same_dim(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

// splitmix64; chosen over std distributions so sampled matrices are
// bit-identical across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

// --- Matrix -----------------------------------------------------------------

Matrix::Matrix(std::initializer_list<std::initializer_list<Complex>> rows) : n_(rows.size()) {
  a_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw DimensionMismatch(n_, row.size());
    a_.insert(a_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

bool Matrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_dim(*this, o);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_dim(*this, o);
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(Complex c) {
  for (auto& z : a_) z *= c;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return std::sqrt(s);
}

double hermitian_asymmetry(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

Matrix symmetrized(const Matrix& m) {
  const std::size_t n = m.dim();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex z = 0.5 * (m(i, j) + std::conj(m(j, i)));
      r(i, j) = z;
      r(j, i) = std::conj(z);
    }
  }
  return r;
}

// --- HermitianMatrix --------------------------------------------------------

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  if (!m.all_finite()) throw NonFiniteInput();
  const double tol = 1e-12 * std::max(1.0, frobenius_norm(m));
  const double asym = hermitian_asymmetry(m);
  if (asym > tol) throw NonHermitianInput(asym);
  m_ = symmetrized(m);
}

HermitianMatrix make_hermitian_unchecked(Matrix m) {
  return HermitianMatrix(symmetrized(m), HermitianMatrix::Trusted{});
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  return HermitianMatrix(Matrix::identity(n), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
  return HermitianMatrix(Matrix::diagonal(d));
}

HermitianMatrix HermitianMatrix::diagonal(std::initializer_list<double> d) {
  return diagonal(std::span<const double>(d.begin(), d.size()));
}

// --- Eigensolver ------------------------------------------------------------

EigenDecomposition eig_hermitian(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  Matrix a = h.matrix();
  Matrix v = Matrix::identity(n);

  const double threshold = 1e-14 * frobenius_norm(a);
  const std::size_t max_sweeps = 30 * n * n;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  bool converged = false;
  for (std::size_t sweep = 0; sweep <= max_sweeps; ++sweep) {
    if (off_norm() <= threshold) {
      converged = true;
      break;
    }
    if (sweep == max_sweeps) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;

        // Phase-rotate a_pq onto the positive real axis, then apply the real
        // Jacobi rotation. Combined: J = diag(1, conj(phase)) * R(c, s).
        const Complex phase = apq / mag;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const Complex jpp = c;
        const Complex jpq = s;
        const Complex jqp = -s * std::conj(phase);
        const Complex jqq = c * std::conj(phase);

        // A <- A J
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        // A <- J* A
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        // V <- V J
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (!converged) throw ConvergenceFailure("Jacobi eigensolver exceeded its sweep budget");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.vectors = Matrix(n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.eigenvalues[col] = a(src, src).real();
    for (std::size_t row = 0; row < n; ++row) out.vectors(row, col) = v(row, src);
  }
  return out;
}

double pd_floor(std::size_t n, double lambda_max) {
  return static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::max(lambda_max, 0.0);
}

DefinitenessResult is_positive_definite(const HermitianMatrix& m) {
  const auto e = eig_hermitian(m);
  const bool pd = e.min() > 0.0 && e.min() > pd_floor(m.dim(), e.max());
  return {pd, e.min()};
}

// --- PDMatrix ---------------------------------------------------------------

PDMatrix::PDMatrix(HermitianMatrix h) {
  const auto r = is_positive_definite(h);
  if (!r.positive_definite) throw NotPositiveDefinite(r.min_eig);
  h_ = std::move(h);
  min_eig_ = r.min_eig;
}

PDMatrix PDMatrix::identity(std::size_t n) { return PDMatrix(HermitianMatrix::identity(n), 1.0); }

PDMatrix PDMatrix::diagonal(std::span<const double> d) {
  return PDMatrix(HermitianMatrix::diagonal(d));
}

PDMatrix PDMatrix::diagonal(std::initializer_list<double> d) {
  return diagonal(std::span<const double>(d.begin(), d.size()));
}

PDMatrix spectral_function_pd(const EigenDecomposition& e, double exponent) {
  const std::size_t n = e.eigenvalues.size();
  const auto [emin, emax] = std::minmax_element(e.eigenvalues.begin(), e.eigenvalues.end());
  if (*emin <= 0.0 || *emin <= pd_floor(n, *emax)) throw NotPositiveDefinite(*emin);

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(e.eigenvalues[i], exponent);
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (!(*lo > pd_floor(n, *hi)) || !std::isfinite(*hi)) throw NotPositiveDefinite(*lo);

  const Matrix& v = e.vectors;
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * f[k] * std::conj(v(j, k));
      r(i, j) = s;
      r(j, i) = std::conj(s);
    }
  return PDMatrix(make_hermitian_unchecked(std::move(r)), *lo);
}

PDMatrix matrix_power(const PDMatrix& p, double exponent) {
  return matrix_power(p.hermitian(), exponent);
}

PDMatrix matrix_power(const HermitianMatrix& h, double exponent) {
  if (!std::isfinite(exponent) || exponent == 0.0)
    throw InvalidArgument("matrix_power: exponent must be finite and nonzero");
  return spectral_function_pd(eig_hermitian(h), exponent);
}

// --- Arithmetic -------------------------------------------------------------

HermitianMatrix congruence(const Matrix& a, const HermitianMatrix& m) {
  require_same_dim(a, m.matrix());
  return make_hermitian_unchecked(a.adjoint() * m.matrix() * a);
}

HermitianMatrix add(const HermitianMatrix& a, const HermitianMatrix& b) {
  return make_hermitian_unchecked(a.matrix() + b.matrix());
}

HermitianMatrix subtract(const HermitianMatrix& a, const HermitianMatrix& b) {
  return make_hermitian_unchecked(a.matrix() - b.matrix());
}

HermitianMatrix scale(double c, const HermitianMatrix& m) {
  return make_hermitian_unchecked(Complex(c) * m.matrix());
}

// --- Sampling ---------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 g(base ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
  return g.next();
}

Matrix random_gaussian_matrix(std::size_t n, std::uint64_t seed) {
  SplitMix64 g(seed);
  Matrix z(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = g.normal();
      const double im = g.normal();
      z(i, j) = Complex(re, im) * std::numbers::sqrt2 * 0.5;
    }
  return z;
}

Matrix random_unitary(std::size_t n, std::uint64_t seed) {
  const Matrix z = random_gaussian_matrix(n, seed);
  Matrix q(n);
  // Modified Gram-Schmidt with one reorthogonalization pass. The resulting R
  // has a positive real diagonal, which fixes the column phases.
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = z(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot{};
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * col[i];
        for (std::size_t i = 0; i < n; ++i) col[i] -= dot * q(i, k);
      }
    }
    double norm = 0.0;
    for (const auto& c : col) norm += std::norm(c);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / norm;
  }
  return q;
}

PDMatrix random_pd_in_ball(std::size_t n, double radius, std::uint64_t seed) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw InvalidArgument("random_pd_in_ball: radius must be finite and nonnegative");
  if (radius == 0.0) return PDMatrix::identity(n);

  SplitMix64 g(derive_seed(seed, 0));
  std::vector<double> logs(n);
  for (auto& t : logs) t = radius * (2.0 * g.uniform() - 1.0);

  EigenDecomposition e;
  e.vectors = random_unitary(n, derive_seed(seed, 1));
  e.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.eigenvalues[i] = std::exp(logs[i]);
  return spectral_function_pd(e, 1.0);
}

}  // namespace tfp
