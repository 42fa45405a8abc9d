#include "ballmax/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ballmax/quadrature.hpp"

namespace ballmax {

std::string family_name(Family f) {
  switch (f) {
    case Family::PowerDecay: return "power_decay";
    case Family::LinearCutoff: return "linear_cutoff";
    case Family::Exponential: return "exponential";
    case Family::Tabulated: return "tabulated";
  }
  return "unknown";
}

namespace {

void validate_common(Real a, Real p, int dim) {
  if (!(a > 0.0)) throw std::invalid_argument("Integrand: a must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("Integrand: p must be >= 1");
  if (!supported_dimension(dim))
    throw std::invalid_argument("Integrand: dim must be 1, 2 or 3");
}

Real interp1(const std::vector<Real>& knots, Real x, std::size_t* seg) {
  // clamp outside the knot range, return the local coordinate in [0, 1]
  if (x <= knots.front()) {
    *seg = 0;
    return 0.0;
  }
  if (x >= knots.back()) {
    *seg = knots.size() - 2;
    return 1.0;
  }
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  *seg = static_cast<std::size_t>(it - knots.begin()) - 1;
  return (x - knots[*seg]) / (knots[*seg + 1] - knots[*seg]);
}

}  // namespace

Real Integrand::operator()(Real r, Real s) const {
  switch (family) {
    case Family::PowerDecay:
      return std::pow(1.0 + r, -m) * std::pow(s, q);
    case Family::LinearCutoff:
      return std::max(c - r, 0.0) * std::pow(s, q);
    case Family::Exponential:
      return std::exp(-gamma * r) * std::pow(s, q);
    case Family::Tabulated: {
      std::size_t i, j;
      const Real tr = interp1(r_knots, r, &i);
      const Real ts = interp1(s_knots, s, &j);
      const Real lo = (1.0 - ts) * table(i, j) + ts * table(i, j + 1);
      const Real hi = (1.0 - ts) * table(i + 1, j) + ts * table(i + 1, j + 1);
      return (1.0 - tr) * lo + tr * hi;
    }
  }
  return 0.0;
}

Integrand Integrand::power_decay(Real m, Real q, Real a, Real p, int dim) {
  validate_common(a, p, dim);
  if (!(m > 0.0) || !(q > 0.0))
    throw std::invalid_argument("power_decay: m and q must be positive");
  Integrand F;
  F.family = Family::PowerDecay;
  F.m = m; F.q = q; F.a = a; F.p = p; F.dim = dim;
  return F;
}

Integrand Integrand::linear_cutoff(Real c, Real q, Real a, Real p, int dim) {
  validate_common(a, p, dim);
  if (!(c > 0.0) || !(q > 0.0))
    throw std::invalid_argument("linear_cutoff: c and q must be positive");
  Integrand F;
  F.family = Family::LinearCutoff;
  F.c = c; F.q = q; F.a = a; F.p = p; F.dim = dim;
  return F;
}

Integrand Integrand::exponential(Real gamma, Real q, Real a, Real p, int dim) {
  validate_common(a, p, dim);
  if (!(gamma > 0.0) || !(q > 0.0))
    throw std::invalid_argument("exponential: gamma and q must be positive");
  Integrand F;
  F.family = Family::Exponential;
  F.gamma = gamma; F.q = q; F.a = a; F.p = p; F.dim = dim;
  return F;
}

Integrand Integrand::tabulated(std::vector<Real> r_knots, std::vector<Real> s_knots,
                               MatrixXr table, Real a, Real p, int dim) {
  validate_common(a, p, dim);
  if (r_knots.size() < 2 || s_knots.size() < 2)
    throw std::invalid_argument("tabulated: need at least 2 knots per axis");
  if (table.rows() != static_cast<Index>(r_knots.size()) ||
      table.cols() != static_cast<Index>(s_knots.size()))
    throw std::invalid_argument("tabulated: table shape does not match knots");
  for (std::size_t i = 0; i + 1 < r_knots.size(); ++i)
    if (!(r_knots[i + 1] > r_knots[i]))
      throw std::invalid_argument("tabulated: r knots must increase");
  for (std::size_t j = 0; j + 1 < s_knots.size(); ++j)
    if (!(s_knots[j + 1] > s_knots[j]))
      throw std::invalid_argument("tabulated: s knots must increase");
  if (s_knots.front() != 0.0 || s_knots.back() != a)
    throw std::invalid_argument("tabulated: s knots must span [0, a]");
  if ((table.col(0).array() != 0.0).any())
    throw std::invalid_argument("tabulated: F(r, 0) must vanish");
  if ((table.array() < 0.0).any())
    throw std::invalid_argument("tabulated: values must be nonnegative");
  Integrand F;
  F.family = Family::Tabulated;
  F.a = a; F.p = p; F.dim = dim;
  F.r_knots = std::move(r_knots);
  F.s_knots = std::move(s_knots);
  F.table = std::move(table);
  return F;
}

Real eval(const Integrand& F, Real r, Real s) {
  if (r < 0.0) throw std::domain_error("eval: r must be nonnegative");
  if (s < 0.0 || s > F.a) throw std::domain_error("eval: s must lie in [0, a]");
  return F(r, s);
}

H1Result check_h1(const Integrand& F, const ArrayXr& r_grid, const ArrayXr& s_samples,
                  Real tol, Real tol_strict) {
  if (r_grid.size() < 2) throw std::invalid_argument("check_h1: need >= 2 radii");
  for (Index i = 0; i + 1 < r_grid.size(); ++i)
    if (!(r_grid[i + 1] > r_grid[i]))
      throw std::invalid_argument("check_h1: r grid must increase");

  H1Result out;
  Real worst = 0.0;
  for (Index k = 0; k < s_samples.size(); ++k) {
    const Real s = s_samples[k];
    Real prev = F(r_grid[0], s);
    for (Index i = 1; i < r_grid.size(); ++i) {
      const Real cur = F(r_grid[i], s);
      worst = std::max(worst, cur - prev);
      prev = cur;
    }
  }
  out.worst_violation = worst;
  out.pass = worst <= tol;

  out.strict_decrease = true;
  Real prev = F(r_grid[0], F.a);
  for (Index i = 1; i < r_grid.size(); ++i) {
    const Real cur = F(r_grid[i], F.a);
    if (!(prev > cur + tol_strict)) {
      out.strict_decrease = false;
      break;
    }
    prev = cur;
  }
  return out;
}

ConditionResult check_condition(const Integrand& F, const ArrayXr& r_grid,
                                const ArrayXr& lambda_grid, Real tol) {
  if (lambda_grid.size() < 2 || lambda_grid.minCoeff() != 0.0 ||
      lambda_grid.maxCoeff() != 1.0)
    throw std::invalid_argument("check_condition: lambda grid must include 0 and 1");
  ConditionResult out;
  Real worst = 0.0;
  for (Index i = 0; i < r_grid.size(); ++i) {
    const Real at_a = F(r_grid[i], F.a);
    for (Index k = 0; k < lambda_grid.size(); ++k) {
      const Real lam = lambda_grid[k];
      const Real lhs = F(r_grid[i], lam * F.a);
      worst = std::max(worst, lhs - pow_p(lam, F.p) * at_a);
    }
  }
  out.worst_violation = worst;
  out.pass = worst <= tol;
  return out;
}

Real estimate_lambda(const Integrand& F, const ArrayXr& r_grid) {
  if (r_grid.size() < 2) throw std::invalid_argument("estimate_lambda: need >= 2 radii");
  ArrayXr fa(r_grid.size());
  for (Index i = 0; i < r_grid.size(); ++i) fa[i] = F(r_grid[i], F.a);
  Real lo = std::numeric_limits<Real>::infinity();
  for (Index i = 0; i + 1 < r_grid.size(); ++i)
    for (Index j = i + 1; j < r_grid.size(); ++j)
      lo = std::min(lo, (fa[i] - fa[j]) / (r_grid[j] - r_grid[i]));
  return std::max(lo, 0.0);
}

H2Result check_h2(const Integrand& F, const std::function<Real(Real)>& alpha,
                  const std::function<Real(Real)>& beta, const ArrayXr& r_grid,
                  const ArrayXr& s_samples, Real tol) {
  H2Result out;
  Real worst = 0.0;
  for (Index i = 0; i < r_grid.size(); ++i) {
    const Real ar = alpha(r_grid[i]);
    for (Index k = 0; k < s_samples.size(); ++k)
      worst = std::max(worst, F(r_grid[i], s_samples[k]) - ar * beta(s_samples[k]));
  }
  out.worst_violation = worst;
  out.pass = worst <= tol;
  const Real r_max = r_grid[r_grid.size() - 1];
  out.alpha_integral = adaptive_simpson(
      [&](Real r) { return alpha(r) * radial_weight(r, F.dim); }, 0.0, r_max, 1e-12);
  return out;
}

std::pair<std::function<Real(Real)>, std::function<Real(Real)>> canonical_h2_pair(
    const Integrand& F) {
  const Real q = F.q;
  std::function<Real(Real)> beta = [q](Real s) { return std::pow(s, q); };
  switch (F.family) {
    case Family::PowerDecay: {
      const Real m = F.m;
      return {[m](Real r) { return std::pow(1.0 + r, -m); }, beta};
    }
    case Family::LinearCutoff: {
      const Real c = F.c;
      return {[c](Real r) { return std::max(c - r, 0.0); }, beta};
    }
    case Family::Exponential: {
      const Real g = F.gamma;
      return {[g](Real r) { return std::exp(-g * r); }, beta};
    }
    case Family::Tabulated: {
      // row-wise envelope; bilinear values never exceed the corner maximum
      Integrand T = F;
      return {[T](Real r) {
                Real best = 0.0;
                for (Index j = 0; j < T.table.cols(); ++j)
                  best = std::max(best, T(r, T.s_knots[static_cast<std::size_t>(j)]));
                return best;
              },
              [](Real) { return 1.0; }};
    }
  }
  return {[](Real) { return 0.0; }, beta};
}

HypothesisReport run_hypothesis_checks(const Integrand& F, const ArrayXr& r_grid,
                                       Real tol) {
  HypothesisReport rep;
  const ArrayXr s_samples = ArrayXr::LinSpaced(9, 0.0, F.a);
  const ArrayXr lambda_grid = ArrayXr::LinSpaced(11, 0.0, 1.0);
  rep.h1 = check_h1(F, r_grid, s_samples, tol);
  rep.condition = check_condition(F, r_grid, lambda_grid, tol);
  const auto [alpha, beta] = canonical_h2_pair(F);
  rep.h2 = check_h2(F, alpha, beta, r_grid, s_samples, tol);
  rep.lambda_hat = estimate_lambda(F, r_grid);
  return rep;
}

}  // namespace ballmax
