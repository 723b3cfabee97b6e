#include "tfp/psi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfp {

std::string to_string(PsiKind k) {
  switch (k) {
    case PsiKind::scaled_first: return "scaled_first";
    case PsiKind::linear: return "linear";
    case PsiKind::scaled_max: return "scaled_max";
  }
  return "?";
}

PsiKind psi_kind_from_string(const std::string& s) {
  if (s == "scaled_first") return PsiKind::scaled_first;
  if (s == "linear") return PsiKind::linear;
  if (s == "scaled_max") return PsiKind::scaled_max;
  throw InvalidArgument("unknown psi kind '" + s + "'");
}

PsiSpec PsiSpec::scaled_first(double alpha) { return make(PsiKind::scaled_first, {alpha}); }

PsiSpec PsiSpec::linear(double m, double n, double o) { return make(PsiKind::linear, {m, n, o}); }

PsiSpec PsiSpec::scaled_max(double alpha) { return make(PsiKind::scaled_max, {alpha}); }

PsiSpec PsiSpec::unchecked(PsiKind kind, std::vector<double> params) {
  const std::size_t want = kind == PsiKind::linear ? 3 : 1;
  if (params.size() != want)
    throw InvalidArgument("psi '" + to_string(kind) + "' takes " + std::to_string(want) +
                          " parameter(s), got " + std::to_string(params.size()));
  return PsiSpec(kind, std::move(params));
}

PsiSpec PsiSpec::make(PsiKind kind, std::vector<double> params) {
  PsiSpec p = unchecked(kind, std::move(params));
  for (double v : p.params_)
    if (!std::isfinite(v) || v < 0.0)
      throw NotInPsiAlpha(to_string(kind) + ": parameters must be finite and nonnegative");
  if (kind == PsiKind::linear) {
    const double sum = p.params_[0] + p.params_[1] + p.params_[2];
    if (!(sum < 1.0)) throw NotInPsiAlpha("linear: M + N + O must be < 1");
  } else if (!(p.params_[0] < 1.0)) {
    throw NotInPsiAlpha(to_string(kind) + ": alpha must lie in [0, 1)");
  }
  p.alpha_effective();
  return p;
}

double PsiSpec::eval(double a, double b, double c) const {
  switch (kind_) {
    case PsiKind::scaled_first: return params_[0] * a;
    case PsiKind::linear: return params_[0] * a + params_[1] * b + params_[2] * c;
    case PsiKind::scaled_max: return params_[0] * std::max({a, b, c});
  }
  return 0.0;
}

double PsiSpec::raw_alpha() const {
  if (kind_ != PsiKind::linear) return params_[0];
  const double m = params_[0], n = params_[1], o = params_[2];
  // Solve each branch for b/a: b <= Ma+Na+Ob, b <= Mb+Na+Oa, b <= Ma+Nb+Oa.
  auto ratio = [](double num, double den) {
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  };
  return std::max({ratio(m + n, 1.0 - o), ratio(n + o, 1.0 - m), ratio(m + o, 1.0 - n)});
}

double PsiSpec::alpha_effective() const {
  const double alpha = raw_alpha();
  if (!(alpha < 1.0))
    throw NotInPsiAlpha(to_string(kind_) + ": contraction constant " + std::to_string(alpha) +
                        " is not below 1");
  return alpha;
}

MembershipReport check_membership(const PsiSpec& psi, std::size_t grid_size, double lo, double hi) {
  if (grid_size < 2) throw InvalidArgument("check_membership: grid_size must be >= 2");
  MembershipReport report;
  report.alpha = psi.raw_alpha();

  std::vector<double> grid(grid_size);
  const double step = std::log(hi / lo) / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));

  // The diagonal b = a is where an alpha >= 1 shows up, so it is on the grid
  // by construction.
  const double alpha = report.alpha;
  const double rel = 1e-9;
  for (double a : grid) {
    for (double b : grid) {
      ++report.points_checked;
      const bool premise[3] = {b <= psi.eval(a, a, b), b <= psi.eval(b, a, a), b <= psi.eval(a, b, a)};
      const bool conclusion = alpha < 1.0 && b <= alpha * a * (1.0 + rel);
      for (int branch = 0; branch < 3; ++branch) {
        if (premise[branch] && !conclusion) {
          report.counterexample = MembershipCounterexample{a, b, branch + 1};
          report.member = false;
          return report;
        }
      }
    }
  }
  report.member = alpha < 1.0;
  return report;
}

}  // namespace tfp
