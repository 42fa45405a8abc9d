#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ballmax {

using Real = double;
using Index = Eigen::Index;

using ArrayXr = Eigen::ArrayX<Real>;
using ArrayXXr = Eigen::ArrayXX<Real>;
using VectorXr = Eigen::VectorX<Real>;
using MatrixXr = Eigen::MatrixX<Real>;

inline bool supported_dimension(int dim) { return dim == 1 || dim == 2 || dim == 3; }

// Volume of the unit ball in R^dim.
inline Real unit_ball_volume(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
  }
  throw std::invalid_argument("unit_ball_volume: dim must be 1, 2 or 3");
}

// Total surface measure of the unit sphere S^{dim-1} (counting measure {+1,-1}
// for dim == 1).
inline Real sphere_surface(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw std::invalid_argument("sphere_surface: dim must be 1, 2 or 3");
}

// r^{dim-1}, the polar volume factor.
inline Real radial_weight(Real r, int dim) {
  return dim == 1 ? 1.0 : (dim == 2 ? r : r * r);
}

// s^p with fast paths for the common exponents.
inline Real pow_p(Real s, Real p) {
  if (p == 2.0) return s * s;
  if (p == 1.0) return s;
  return std::pow(s, p);
}

}  // namespace ballmax
