#include "ballmax/ray_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ballmax {

PiecewisePowerDensity::PiecewisePowerDensity(int dim, std::vector<Real> breaks,
                                             std::vector<Real> coeffs)
    : dim_(dim), breaks_(std::move(breaks)), coeffs_(std::move(coeffs)) {
  if (!supported_dimension(dim_))
    throw std::invalid_argument("PiecewisePowerDensity: dim must be 1, 2 or 3");
  if (breaks_.size() < 2 || coeffs_.size() + 1 != breaks_.size())
    throw std::invalid_argument("PiecewisePowerDensity: sizes do not match");
  if (breaks_.front() != 0.0)
    throw std::invalid_argument("PiecewisePowerDensity: breaks must start at 0");
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
    if (!(breaks_[k + 1] > breaks_[k]))
      throw std::invalid_argument("PiecewisePowerDensity: breaks must increase");
  for (Real c : coeffs_)
    if (!(c >= 0.0)) throw std::invalid_argument("PiecewisePowerDensity: negative coeff");

  cum_.assign(breaks_.size(), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    cum_[k + 1] = cum_[k] + power_cell_mass(coeffs_[k], breaks_[k], breaks_[k + 1], dim_);

  support_begin_ = breaks_.back();
  support_end_ = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] > 0.0) {
      support_begin_ = std::min(support_begin_, breaks_[k]);
      support_end_ = std::max(support_end_, breaks_[k + 1]);
    }
  }
  if (support_end_ == 0.0) support_begin_ = 0.0;  // identically zero
}

Real PiecewisePowerDensity::density(Real r) const {
  if (r < breaks_.front() || r > breaks_.back()) return 0.0;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
  k = (k == 0) ? 0 : k - 1;
  if (k >= coeffs_.size()) k = coeffs_.size() - 1;
  return coeffs_[k] * radial_weight(r, dim_);
}

Real PiecewisePowerDensity::cdf(Real r) const {
  if (r <= breaks_.front()) return 0.0;
  if (r >= breaks_.back()) return cum_.back();
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return cum_[k] + power_cell_mass(coeffs_[k], breaks_[k], r, dim_);
}

Real PiecewisePowerDensity::quantile(Real m) const {
  const Real total = cum_.back();
  if (total <= 0.0) return 0.0;
  if (m <= 0.0) return support_begin_;
  if (m >= total) return support_end_;
  auto it = std::lower_bound(cum_.begin(), cum_.end(), m);
  const std::size_t j = static_cast<std::size_t>(it - cum_.begin());
  if (cum_[j] == m) return breaks_[j];
  const std::size_t k = j - 1;  // cum_[k] < m < cum_[k+1], so coeffs_[k] > 0
  const Real n = static_cast<Real>(dim_);
  const Real target = std::pow(breaks_[k], n) + n * (m - cum_[k]) / coeffs_[k];
  return std::pow(target, 1.0 / n);
}

}  // namespace ballmax
