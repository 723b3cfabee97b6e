#include "tfp/matrix_solver.hpp"

#include <cmath>
#include <thread>

namespace tfp {

MatrixFunctionSpec MatrixFunctionSpec::power(double exponent) {
  if (!std::isfinite(exponent) || exponent == 0.0 || exponent < -1.0 || exponent > 1.0)
    throw InvalidArgument("power exponent must lie in [-1, 1] and be nonzero");
  MatrixFunctionSpec f;
  f.kind = Kind::power;
  f.exponent = exponent;
  return f;
}

MatrixFunctionSpec MatrixFunctionSpec::constant(PDMatrix value) {
  MatrixFunctionSpec f;
  f.kind = Kind::constant;
  f.exponent = 0.0;
  f.value = std::move(value);
  return f;
}

PDMatrix apply_F(const MatrixFunctionSpec& spec, const PDMatrix& x) {
  if (spec.kind == MatrixFunctionSpec::Kind::constant) {
    if (spec.value->dim() != x.dim()) throw DimensionMismatch(x.dim(), spec.value->dim());
    return *spec.value;
  }
  if (spec.exponent == 1.0) return x;
  return matrix_power(x, spec.exponent);
}

std::string to_string(ProblemKind k) { return k == ProblemKind::type1 ? "type1" : "type2"; }

std::string to_string(BallConvention b) { return b == BallConvention::proof ? "proof" : "exponential"; }

// --- Validation -------------------------------------------------------------

namespace {

void validate_function(const MatrixFunctionSpec& f, const std::string& key, std::size_t n) {
  if (f.kind == MatrixFunctionSpec::Kind::constant) {
    if (!f.value) throw InvalidProblem(key, "constant function has no value");
    if (f.value->dim() != n) throw InvalidProblem(key, "constant has the wrong dimension");
  } else if (!std::isfinite(f.exponent) || f.exponent == 0.0 || std::abs(f.exponent) > 1.0) {
    throw InvalidProblem(key, "power exponent must lie in [-1, 1] and be nonzero");
  }
}

bool is_unitary(const Matrix& u) {
  return frobenius_norm(u.adjoint() * u - Matrix::identity(u.dim())) <= 1e-10;
}

bool is_nonsingular(const Matrix& a) {
  return is_positive_definite(congruence(a, HermitianMatrix::identity(a.dim()))).positive_definite;
}

}  // namespace

void validate(const ProblemSpec& p) {
  if (p.A.empty()) throw InvalidProblem("A", "at least one coefficient matrix is required");
  const std::size_t n = p.n();
  if (n == 0) throw InvalidProblem("A[0]", "matrix is empty");
  for (std::size_t i = 0; i < p.A.size(); ++i) {
    const std::string key = "A[" + std::to_string(i) + "]";
    if (p.A[i].dim() != n) throw InvalidProblem(key, "dimension differs from A[0]");
    if (!p.A[i].all_finite()) throw InvalidProblem(key, "non-finite entry");
  }
  if (!(p.s > 1.0) || !std::isfinite(p.s)) throw InvalidProblem("s", "must be a finite real > 1");
  if (!(p.a >= 0.0) || !std::isfinite(p.a)) throw InvalidProblem("a", "must be a finite real >= 0");
  if (!(p.l > 0.0) || !std::isfinite(p.l)) throw InvalidProblem("l", "must be a finite real > 0");
  validate_function(p.F, "F", n);
  validate_function(p.G, "G", n);

  if (p.kind == ProblemKind::type1) {
    if (!p.Q1) throw InvalidProblem("Q1", "required for type1");
    if (!p.Q2) throw InvalidProblem("Q2", "required for type1");
    if (p.Q1->dim() != n) throw InvalidProblem("Q1", "dimension differs from A");
    if (p.Q2->dim() != n) throw InvalidProblem("Q2", "dimension differs from A");
    if (p.r) throw InvalidProblem("r", "only valid for type2");
    for (std::size_t i = 0; i < p.A.size(); ++i)
      if (!is_nonsingular(p.A[i])) throw InvalidProblem("A[" + std::to_string(i) + "]", "must be nonsingular");
    if (!(p.l < p.s)) throw InvalidProblem("l", "type1 requires l < s");
  } else {
    if (p.Q1 || p.Q2) throw InvalidProblem(p.Q1 ? "Q1" : "Q2", "only valid for type1");
    if (!p.r) throw InvalidProblem("r", "required for type2");
    if (!(*p.r > 1.0) || !std::isfinite(*p.r)) throw InvalidProblem("r", "must be a finite real > 1");
    for (std::size_t i = 0; i < p.A.size(); ++i)
      if (!is_unitary(p.A[i])) throw InvalidProblem("A[" + std::to_string(i) + "]", "must be unitary");
    const double r = *p.r;
    if (!(3.0 * p.l < r * p.s / (r + p.s))) throw InvalidProblem("l", "type2 requires 3l < rs/(r+s)");
  }
}

double contraction_constant(const ProblemSpec& p) {
  if (p.kind == ProblemKind::type1) return p.l / p.s;
  return 3.0 * p.l * (1.0 / *p.r + 1.0 / p.s);
}

double ball_radius(const ProblemSpec& p) {
  const double base = p.kind == ProblemKind::type1 ? p.a : *p.r * p.a;
  return p.ball == BallConvention::proof ? base : std::exp(base);
}

// --- Maps -------------------------------------------------------------------

namespace {

HermitianMatrix congruence_sum(const std::vector<Matrix>& a, const PDMatrix& fx) {
  Matrix acc(fx.dim());
  for (const auto& ai : a) acc += congruence(ai, fx.hermitian()).matrix();
  return make_hermitian_unchecked(std::move(acc));
}

}  // namespace

MatrixMap build_map_type1(PDMatrix q, std::vector<Matrix> a, MatrixFunctionSpec f, double s) {
  return [q = std::move(q), a = std::move(a), f = std::move(f), s](const PDMatrix& x) {
    const HermitianMatrix rhs = add(q.hermitian(), congruence_sum(a, apply_F(f, x)));
    return matrix_power(rhs, 1.0 / s);
  };
}

MatrixMap build_map_type2(std::vector<Matrix> a, MatrixFunctionSpec f, double rho) {
  return [a = std::move(a), f = std::move(f), rho](const PDMatrix& x) {
    return matrix_power(congruence_sum(a, apply_F(f, x)), 1.0 / rho);
  };
}

std::pair<MatrixMap, MatrixMap> build_maps(const ProblemSpec& p) {
  if (p.kind == ProblemKind::type1)
    return {build_map_type1(*p.Q1, p.A, p.F, p.s), build_map_type1(*p.Q2, p.A, p.G, p.s)};
  return {build_map_type2(p.A, p.F, *p.r), build_map_type2(p.A, p.G, p.s)};
}

Residuals residuals(const ProblemSpec& p, const PDMatrix& x) {
  auto relative = [&](double exponent, const std::optional<PDMatrix>& q, const MatrixFunctionSpec& f) {
    const PDMatrix lhs = matrix_power(x, exponent);
    HermitianMatrix rhs = congruence_sum(p.A, apply_F(f, x));
    if (q) rhs = add(q->hermitian(), rhs);
    const double scale_norm = std::max(1.0, frobenius_norm(lhs.matrix()));
    return frobenius_norm(lhs.matrix() - rhs.matrix()) / scale_norm;
  };
  if (p.kind == ProblemKind::type1) return {relative(p.s, p.Q1, p.F), relative(p.s, p.Q2, p.G)};
  return {relative(*p.r, std::nullopt, p.F), relative(p.s, std::nullopt, p.G)};
}

// --- Condition checking -----------------------------------------------------

namespace {

struct Evaluation {
  std::size_t slot;  // index into the merged condition/diagnostic list
  const char* inequality;
  double lhs;
  double rhs;
};

struct SampleOutcome {
  PDMatrix x, y;
  std::vector<Evaluation> evals;
};

double lambda_max(const PDMatrix& m) { return eig_hermitian(m.hermitian()).max(); }

template <class Evaluate>
ConditionReport run_checks(const ProblemSpec& p, const CheckOptions& opt, std::vector<std::string> names,
                           std::size_t n_conditions, Evaluate evaluate) {
  if (opt.samples == 0) throw InvalidArgument("check: samples must be >= 1");
  const std::size_t n = p.n();
  const double radius = ball_radius(p);

  std::vector<SampleOutcome> outcomes(opt.samples);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < opt.samples; i += stride) {
      SampleOutcome& o = outcomes[i];
      o.x = random_pd_in_ball(n, radius, derive_seed(opt.seed, 2 * i));
      o.y = random_pd_in_ball(n, radius, derive_seed(opt.seed, 2 * i + 1));
      evaluate(o.x, o.y, o.evals);
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.samples)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Merge in sample order; identical for any thread count.
  std::vector<ConditionResult> merged(names.size());
  std::vector<std::vector<bool>> sample_ok(names.size(), std::vector<bool>(opt.samples, true));
  std::vector<std::vector<bool>> seen(names.size(), std::vector<bool>(opt.samples, false));
  for (std::size_t c = 0; c < names.size(); ++c) merged[c].name = names[c];

  for (std::size_t i = 0; i < opt.samples; ++i) {
    for (const Evaluation& e : outcomes[i].evals) {
      ConditionResult& res = merged[e.slot];
      seen[e.slot][i] = true;
      const double margin = e.rhs - e.lhs;
      const bool ok = holds_with_slack(e.lhs, e.rhs);
      if (!ok) sample_ok[e.slot][i] = false;
      if (!res.witness || margin < res.worst_margin) {
        res.worst_margin = margin;
        res.witness = ConditionWitness{i, e.inequality, outcomes[i].x, outcomes[i].y, e.lhs, e.rhs};
      }
    }
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    for (std::size_t i = 0; i < opt.samples; ++i) {
      if (!seen[c][i]) continue;
      ++merged[c].checked;
      if (sample_ok[c][i]) ++merged[c].passed;
    }
    if (merged[c].ok()) merged[c].witness.reset();
  }

  ConditionReport report;
  report.kind = p.kind;
  report.seed = opt.seed;
  report.samples = opt.samples;
  report.radius = radius;
  report.conditions.assign(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(n_conditions));
  report.diagnostics.assign(merged.begin() + static_cast<std::ptrdiff_t>(n_conditions), merged.end());
  return report;
}

}  // namespace

bool ConditionReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.ok(); });
}

ConditionReport check_conditions_type1(const ProblemSpec& p, const CheckOptions& opt) {
  if (p.kind != ProblemKind::type1) throw InvalidArgument("check_conditions_type1: problem is not type1");
  validate(p);
  const auto [t1, t2] = build_maps(p);
  const PDMatrix identity = PDMatrix::identity(p.n());
  const double d_q = distance(*p.Q1, *p.Q2).value();
  const double radius = ball_radius(p);
  const double e_a = std::exp(p.a);

  enum Slot : std::size_t { A, B, C, A_lit, B_lit, C_lit };
  std::vector<std::string> names = {"A", "B", "C", "A_literal", "B_literal", "C_literal"};

  auto evaluate = [&](const PDMatrix& x, const PDMatrix& y, std::vector<Evaluation>& out) {
    const PDMatrix fx = apply_F(p.F, x);
    const PDMatrix gy = apply_F(p.G, y);
    const double w_gf = w_ratio(gy, fx);  // W(G(Y)/F(X))
    const double w_fg = w_ratio(fx, gy);  // W(F(X)/G(Y))
    const double w_yx = w_ratio(y, x);
    const double w_xy = w_ratio(x, y);
    const double d_fg = std::max(0.0, std::max(std::log(w_gf), std::log(w_fg)));
    const double d_xy = std::max(0.0, std::max(std::log(w_yx), std::log(w_xy)));

    // Metric forms used by the contraction argument.
    out.push_back({A, "d(Q1,Q2) <= d(F(X),G(Y))", d_q, d_fg});
    out.push_back({B, "d(F(X),G(Y)) <= l*d(X,Y)", d_fg, p.l * d_xy});

    const PDMatrix t1x = t1(x);
    const PDMatrix t2x = t2(x);
    out.push_back({C, "d(T1(X),I) <= radius", distance(t1x, identity).value(), radius});
    out.push_back({C, "d(T2(X),I) <= radius", distance(t2x, identity).value(), radius});

    // One-sided inequalities exactly as stated with the hypotheses.
    out.push_back({A_lit, "W(Q2/Q1) <= W(G(Y)/F(X))", w_ratio(*p.Q2, *p.Q1), w_gf});
    out.push_back({A_lit, "W(Q1/Q2) <= W(F(X)/G(Y))", w_ratio(*p.Q1, *p.Q2), w_fg});
    out.push_back({B_lit, "W(G(Y)/F(X)) <= W(Y/X)^l", w_gf, std::pow(w_yx, p.l)});
    out.push_back({B_lit, "W(F(X)/G(Y)) <= W(X/Y)^l", w_fg, std::pow(w_xy, p.l)});
    out.push_back({C_lit, "lambda_max(T1(X)) <= e^a", lambda_max(t1x), e_a});
    out.push_back({C_lit, "lambda_max(T1(X)^(-1/4)) <= e^a", lambda_max(matrix_power(t1x, -0.25)), e_a});
    out.push_back({C_lit, "lambda_max(T2(X)) <= e^a", lambda_max(t2x), e_a});
    out.push_back({C_lit, "lambda_max(T2(X)^(-1/4)) <= e^a", lambda_max(matrix_power(t2x, -0.25)), e_a});
  };
  return run_checks(p, opt, names, 3, evaluate);
}

ConditionReport check_conditions_type2(const ProblemSpec& p, const CheckOptions& opt) {
  if (p.kind != ProblemKind::type2) throw InvalidArgument("check_conditions_type2: problem is not type2");
  validate(p);
  const auto [t1, t2] = build_maps(p);
  const PDMatrix identity = PDMatrix::identity(p.n());
  const double r = *p.r;
  const double m = static_cast<double>(p.m());
  const double e_ra = std::exp(r * p.a);
  const double radius = ball_radius(p);
  const double alpha = contraction_constant(p);

  enum Slot : std::size_t { A, B, Ball, Contraction };
  std::vector<std::string> names = {"A", "B", "ball_invariance", "contraction"};

  auto evaluate = [&](const PDMatrix& x, const PDMatrix& y, std::vector<Evaluation>& out) {
    const auto ef = eig_hermitian(apply_F(p.F, x).hermitian());
    const auto eg = eig_hermitian(apply_F(p.G, x).hermitian());
    const double w_xy_l = std::pow(w_ratio(x, y), p.l);
    const double w_yx_l = std::pow(w_ratio(y, x), p.l);

    out.push_back({A, "lambda_max(F(X)) <= e^(ra)/m", ef.max(), e_ra / m});
    out.push_back({A, "lambda_max(F(X)^-1) <= m*e^(ra)", 1.0 / ef.min(), m * e_ra});
    out.push_back({A, "lambda_max(G(X)) <= e^(ra)/m", eg.max(), e_ra / m});
    out.push_back({A, "lambda_max(G(X)^-1) <= m*e^(ra)", 1.0 / eg.min(), m * e_ra});

    out.push_back({B, "lambda_max(F(X)) <= W(X/Y)^l/(m*2^r)", ef.max(), w_xy_l / (m * std::pow(2.0, r))});
    out.push_back({B, "lambda_max(G(X)) <= W(X/Y)^l/(m*2^s)", eg.max(), w_xy_l / (m * std::pow(2.0, p.s))});
    out.push_back({B, "lambda_max(F(X)^-1) <= m*W(Y/X)^l", 1.0 / ef.min(), m * w_yx_l});
    out.push_back({B, "lambda_max(G(X)^-1) <= m*W(Y/X)^l", 1.0 / eg.min(), m * w_yx_l});

    const PDMatrix t1x = t1(x);
    out.push_back({Ball, "d(T1(X),I) <= radius", distance(t1x, identity).value(), radius});
    out.push_back({Ball, "d(T2(X),I) <= radius", distance(t2(x), identity).value(), radius});
    out.push_back({Contraction, "d(T1(X),T2(Y)) <= alpha*d(X,Y)", distance(t1x, t2(y)).value(),
                   alpha * distance(x, y).value()});
  };
  return run_checks(p, opt, names, 2, evaluate);
}

ConditionReport check_conditions(const ProblemSpec& p, const CheckOptions& opt) {
  return p.kind == ProblemKind::type1 ? check_conditions_type1(p, opt) : check_conditions_type2(p, opt);
}

// --- Solve ------------------------------------------------------------------

namespace {

SolveResult assemble(const ProblemSpec& p, IterationTrace<PDMatrix> trace, double alpha) {
  const PDMatrix identity = PDMatrix::identity(p.n());
  SolveResult res;
  res.alpha_used = alpha;
  res.steps.reserve(trace.iterations());
  for (std::size_t k = 1; k < trace.points.size(); ++k) {
    const auto rs = residuals(p, trace.points[k]);
    res.steps.push_back({rs.first, rs.second, distance(trace.points[k], identity).value()});
  }
  res.solution = trace.last();
  if (res.steps.empty()) {
    const auto rs = residuals(p, res.solution);
    res.residual1 = rs.first;
    res.residual2 = rs.second;
    res.dist_to_identity = distance(res.solution, identity).value();
  } else {
    res.residual1 = res.steps.back().residual1;
    res.residual2 = res.steps.back().residual2;
    res.dist_to_identity = res.steps.back().dist_to_identity;
  }
  res.trace = std::move(trace);
  return res;
}

}  // namespace

SolveResult solve(const ProblemSpec& p, const PDMatrix& x0, const SolveOptions& options) {
  validate(p);
  if (x0.dim() != p.n()) throw DimensionMismatch(p.n(), x0.dim());

  const double radius = ball_radius(p);
  const double d0 = distance(x0, PDMatrix::identity(p.n())).value();
  if (d0 > radius + 1e-12) throw X0DomainError(d0, radius);

  std::optional<ConditionReport> report;
  if (!options.force) {
    report = check_conditions(p, options.check);
    if (!report->all_passed()) throw ConditionsNotVerified(*report);
  }

  const double alpha = contraction_constant(p);
  const auto [t1, t2] = build_maps(p);
  StoppingRule stop;
  stop.gap_tol = options.gap_tol;
  stop.max_iter = options.max_iter;

  IterationTrace<PDMatrix> trace;
  try {
    trace = iterate_pair(ThompsonSpace{}, t1, t2, alpha, x0, stop);
  } catch (const MaxIterationsExceeded<PDMatrix>& e) {
    SolveResult partial = assemble(p, e.trace(), alpha);
    partial.conditions = report;
    throw SolveMaxIterationsExceeded(e.what(), std::move(partial));
  }

  SolveResult res = assemble(p, std::move(trace), alpha);
  res.conditions = std::move(report);
  if (!(res.residual1 <= options.residual_tol && res.residual2 <= options.residual_tol)) {
    throw ResidualNotCertified("iteration stalled but residuals exceed tolerance (" +
                                   std::to_string(res.residual1) + ", " + std::to_string(res.residual2) + ")",
                               std::move(res));
  }
  return res;
}

}  // namespace tfp
