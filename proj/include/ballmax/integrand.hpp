#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ballmax/types.hpp"

namespace ballmax {

enum class Family { PowerDecay, LinearCutoff, Exponential, Tabulated };

std::string family_name(Family f);

// Integrand F(r, s) on [0, inf) x [0, a], decreasing in r, together with the
// constraint parameters (a, p) and the ambient dimension.
//
// Built-in families:
//   PowerDecay    F(r, s) = (1 + r)^{-m} s^q
//   LinearCutoff  F(r, s) = max(c - r, 0) s^q
//   Exponential   F(r, s) = exp(-gamma r) s^q
//   Tabulated     bilinear interpolation of a value table on r/s knots
struct Integrand {
  Family family = Family::Exponential;
  Real m = 2.0, c = 1.0, gamma = 1.0, q = 2.0;
  Real a = 1.0;  // amplitude cap
  Real p = 2.0;  // mass exponent
  int dim = 1;

  std::vector<Real> r_knots, s_knots;  // Tabulated only
  MatrixXr table;                      // r_knots.size() x s_knots.size()

  // Unchecked evaluation (r is clamped to the knot range for tables).
  Real operator()(Real r, Real s) const;

  static Integrand power_decay(Real m, Real q, Real a, Real p, int dim);
  static Integrand linear_cutoff(Real c, Real q, Real a, Real p, int dim);
  static Integrand exponential(Real gamma, Real q, Real a, Real p, int dim);
  static Integrand tabulated(std::vector<Real> r_knots, std::vector<Real> s_knots,
                             MatrixXr table, Real a, Real p, int dim);
};

// Checked evaluation: throws std::domain_error for r < 0, s < 0 or s > a.
Real eval(const Integrand& F, Real r, Real s);

struct H1Result {
  bool pass = false;
  Real worst_violation = 0.0;
  bool strict_decrease = false;
};

struct ConditionResult {
  bool pass = false;
  Real worst_violation = 0.0;
};

struct H2Result {
  bool pass = false;
  Real worst_violation = 0.0;
  Real alpha_integral = 0.0;
};

struct HypothesisReport {
  H1Result h1;
  ConditionResult condition;
  H2Result h2;
  Real lambda_hat = 0.0;
  bool all_pass() const { return h1.pass && condition.pass && h2.pass; }
};

// Monotonicity in r on the given grid, every s sample. worst_violation is the
// largest observed increase F(r_{i+1}, s) - F(r_i, s), floored at zero.
// strict_decrease checks F(., a) only, with margin tol_strict.
H1Result check_h1(const Integrand& F, const ArrayXr& r_grid, const ArrayXr& s_samples,
                  Real tol = 1e-10, Real tol_strict = 1e-12);

// Scaling bound F(r, lambda a) <= lambda^p F(r, a) on the product grid.
// lambda_grid must cover [0, 1] including both endpoints.
ConditionResult check_condition(const Integrand& F, const ArrayXr& r_grid,
                                const ArrayXr& lambda_grid, Real tol = 1e-10);

// Smallest difference quotient of F(., a) over all node pairs of the grid,
// floored at zero. The grid fixes the truncated domain the estimate is valid
// on; enlarging the grid can only shrink the estimate.
Real estimate_lambda(const Integrand& F, const ArrayXr& r_grid);

// Domination F(r, s) <= alpha(r) beta(s) on the product grid plus the
// integrability weight: alpha_integral = int_0^{r_max} alpha(r) r^{dim-1} dr.
H2Result check_h2(const Integrand& F, const std::function<Real(Real)>& alpha,
                  const std::function<Real(Real)>& beta, const ArrayXr& r_grid,
                  const ArrayXr& s_samples, Real tol = 1e-10);

// Canonical dominating pair for the built-in families.
std::pair<std::function<Real(Real)>, std::function<Real(Real)>> canonical_h2_pair(
    const Integrand& F);

// All checks on standard sample grids derived from [0, r_max].
HypothesisReport run_hypothesis_checks(const Integrand& F, const ArrayXr& r_grid,
                                       Real tol = 1e-10);

}  // namespace ballmax
