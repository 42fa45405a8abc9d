#include "ballmax/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace ballmax {

namespace {

// Newton iteration on the Legendre polynomial, standard construction.
std::pair<std::vector<Real>, std::vector<Real>> make_rule(int order) {
  std::vector<Real> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    Real t = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    Real dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = t;
      for (int k = 2; k <= order; ++k) {
        const Real p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (t * p1 - p0) / (t * t - 1.0);
      const Real step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[order - 1 - i] = t;
    w[order - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

}  // namespace

const std::pair<std::vector<Real>, std::vector<Real>>& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<Real>, std::vector<Real>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

}  // namespace ballmax
