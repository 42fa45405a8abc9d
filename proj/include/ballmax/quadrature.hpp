#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ballmax/types.hpp"

namespace ballmax {

// Composite Simpson over [lo, hi]. The step count is chosen so the actual
// step is <= h_target; it is always even and at least 2.
template <class F>
Real simpson(F&& f, Real lo, Real hi, Real h_target) {
  if (!(hi > lo)) return 0.0;
  Index steps = static_cast<Index>(std::ceil((hi - lo) / h_target - 1e-12));
  steps = std::max<Index>(steps + (steps % 2), 2);
  const Real h = (hi - lo) / static_cast<Real>(steps);
  Real odd = 0.0, even = 0.0;
  for (Index j = 1; j < steps; j += 2) odd += f(lo + h * static_cast<Real>(j));
  for (Index j = 2; j < steps; j += 2) even += f(lo + h * static_cast<Real>(j));
  return h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even);
}

// Composite Simpson with exact breaks at the given split points. Splits
// outside (lo, hi) are ignored; the list need not be sorted.
template <class F>
Real simpson_segmented(F&& f, Real lo, Real hi, Real h_target,
                       std::vector<Real> splits) {
  if (!(hi > lo)) return 0.0;
  splits.erase(std::remove_if(splits.begin(), splits.end(),
                              [&](Real s) { return !(s > lo && s < hi); }),
               splits.end());
  std::sort(splits.begin(), splits.end());
  Real total = 0.0, a = lo;
  for (Real s : splits) {
    if (s - a > 1e-15 * (1.0 + std::abs(s))) {
      total += simpson(f, a, s, h_target);
      a = s;
    }
  }
  total += simpson(f, a, hi, h_target);
  return total;
}

// Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<Real>, std::vector<Real>>& gauss_legendre(int order);

template <class F>
Real gauss(F&& f, Real lo, Real hi, int order = 16) {
  if (!(hi > lo)) return 0.0;
  const auto& [x, w] = gauss_legendre(order);
  const Real mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  Real total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) total += w[k] * f(mid + half * x[k]);
  return half * total;
}

namespace detail {
template <class F>
Real adapt_step(F& f, Real a, Real b, Real fa, Real fm, Real fb, Real whole,
                Real tol, int depth) {
  const Real m = 0.5 * (a + b);
  const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Real flm = f(lm), frm = f(rm);
  const Real left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Real right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Real delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson; tol is absolute.
template <class F>
Real adaptive_simpson(F&& f, Real a, Real b, Real tol = 1e-12, int max_depth = 40) {
  if (!(b > a)) return 0.0;
  const Real m = 0.5 * (a + b);
  const Real fa = f(a), fm = f(m), fb = f(b);
  const Real whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace ballmax
