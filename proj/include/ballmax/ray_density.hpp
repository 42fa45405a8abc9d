#pragma once

#include <vector>

#include "ballmax/types.hpp"

namespace ballmax {

// Measure on [0, r_max] with density coeff[k] * r^{dim-1} on
// [breaks[k], breaks[k+1]). Closed-form cumulative function and
// left-continuous generalized inverse.
class PiecewisePowerDensity {
 public:
  PiecewisePowerDensity() = default;
  PiecewisePowerDensity(int dim, std::vector<Real> breaks, std::vector<Real> coeffs);

  int dim() const { return dim_; }
  Real mass() const { return cum_.back(); }
  Real r_max() const { return breaks_.back(); }

  Real density(Real r) const;
  Real cdf(Real r) const;
  // quantile(m) = inf{ r : cdf(r) >= m } for m in (0, mass); the endpoints
  // are mapped to the support boundary so zero-density slack never leaks
  // outside the support.
  Real quantile(Real m) const;

  Real support_begin() const { return support_begin_; }
  Real support_end() const { return support_end_; }

  const std::vector<Real>& breaks() const { return breaks_; }
  const std::vector<Real>& coeffs() const { return coeffs_; }
  const std::vector<Real>& cumulative() const { return cum_; }

 private:
  int dim_ = 1;
  std::vector<Real> breaks_{0.0, 1.0};
  std::vector<Real> coeffs_{0.0};
  std::vector<Real> cum_{0.0, 0.0};
  Real support_begin_ = 0.0;
  Real support_end_ = 0.0;
};

// Exact integral of c * r^{dim-1} over [lo, hi].
inline Real power_cell_mass(Real c, Real lo, Real hi, int dim) {
  const Real n = static_cast<Real>(dim);
  return c * (std::pow(hi, n) - std::pow(lo, n)) / n;
}

}  // namespace ballmax
