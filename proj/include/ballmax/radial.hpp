#pragma once

#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ballmax/integrand.hpp"
#include "ballmax/quadrature.hpp"
#include "ballmax/ray_density.hpp"
#include "ballmax/types.hpp"

namespace ballmax {

// Polar product grid: composite Simpson nodes on [0, r_max] paired with a
// direction set whose weights sum to the surface measure of S^{dim-1}.
//   dim 1: the two half-axes, weight 1 each
//   dim 2: equally spaced angles, weight 2 pi / n_dir
//   dim 3: Fibonacci sphere points, weight 4 pi / n_dir
struct RadialGrid {
  int dim = 1;
  Real r_max = 1.0;
  ArrayXr r_nodes;      // Simpson nodes 0 = r_0 < ... < r_S = r_max
  ArrayXr r_weights;    // matching Simpson weights
  MatrixXr directions;  // n_dir x dim unit vectors
  ArrayXr dir_weights;

  Index n_dir() const { return directions.rows(); }
  Index n_nodes() const { return r_nodes.size(); }
  Real h() const { return r_nodes[1] - r_nodes[0]; }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// n_r is the radial subinterval count (rounded up to even, >= 16 required);
// n_dir == 0 picks the per-dimension default (2 / 128 / 256). dim == 1 always
// uses exactly two directions.
GridPtr build_grid(int dim, Real r_max, Index n_r = 512, Index n_dir = 0);

struct RayPiece {
  Real lo = 0.0, hi = 0.0, value = 0.0;
};
// Sorted, disjoint cover of [0, r_max]; the profile value is constant on
// [lo, hi).
using RayProfile = std::vector<RayPiece>;

// Scalar field sampled on a RadialGrid: values(i, j) = u(r_j * nu_i). Rays
// built from piecewise-constant profiles additionally carry their exact
// breakpoints so indicator jumps integrate cell-exactly instead of through
// node sampling.
class GridFunction {
 public:
  GridFunction() = default;

  static GridFunction from_samples(GridPtr grid, ArrayXXr values);
  static GridFunction from_profiles(GridPtr grid, std::vector<RayProfile> profiles);

  const GridPtr& grid() const { return grid_; }
  const ArrayXXr& values() const { return values_; }
  bool is_piecewise(Index ray) const { return !profiles_[static_cast<std::size_t>(ray)].empty(); }
  bool fully_piecewise() const;
  const RayProfile& ray_profile(Index ray) const { return profiles_[static_cast<std::size_t>(ray)]; }

  // Profile value at radius r: exact piece value on piecewise rays, linear
  // interpolation between nodes otherwise.
  Real value_at(Index ray, Real r) const;

  Real max_value() const { return values_.size() ? values_.maxCoeff() : 0.0; }
  Real min_value() const { return values_.size() ? values_.minCoeff() : 0.0; }

  // Multiply all values (and piece values) by factor.
  void scale(Real factor);

 private:
  GridPtr grid_;
  ArrayXXr values_;  // n_dir x n_nodes
  std::vector<RayProfile> profiles_;
};

// Ball maximizer data: radius R with a^p vol(B_R) = 1, height a, and the
// level threshold t = F(R, a).
struct BallProfile {
  Real radius = 0.0;
  Real height = 1.0;
  Real threshold = 0.0;
};

Real ball_radius(int dim, Real a, Real p);
BallProfile ball_profile(const Integrand& F);

// Star-shaped set {r nu : r < kappa(nu)} recorded per grid direction.
struct RaySet {
  GridPtr grid;
  ArrayXr kappa;
};

// --- integration ---------------------------------------------------------

// Integral of g(r, u(r nu_i)) r^{dim-1} dr along ray i. Piecewise rays are
// split exactly at their breakpoints; sampled rays use the grid's Simpson
// weights on node values.
template <class G>
Real integrate_ray(const GridFunction& u, Index ray, G&& g) {
  const RadialGrid& grid = *u.grid();
  const int d = grid.dim;
  if (u.is_piecewise(ray)) {
    Real total = 0.0;
    for (const RayPiece& piece : u.ray_profile(ray)) {
      if (!(piece.hi > piece.lo)) continue;
      total += simpson(
          [&](Real r) { return g(r, piece.value) * radial_weight(r, d); },
          piece.lo, piece.hi, grid.h());
    }
    return total;
  }
  Real total = 0.0;
  for (Index j = 0; j < grid.n_nodes(); ++j)
    total += grid.r_weights[j] * g(grid.r_nodes[j], u.values()(ray, j)) *
             radial_weight(grid.r_nodes[j], d);
  return total;
}

// Same for a two-argument integrand g(r, u(r), v(r)); breakpoints of both
// operands split the integration exactly.
template <class G2>
Real integrate_ray_pair(const GridFunction& u, const GridFunction& v, Index ray,
                        G2&& g) {
  const RadialGrid& grid = *u.grid();
  if (u.grid().get() != v.grid().get())
    throw std::invalid_argument("integrate_ray_pair: grid mismatch");
  const int d = grid.dim;
  if (!u.is_piecewise(ray) && !v.is_piecewise(ray)) {
    Real total = 0.0;
    for (Index j = 0; j < grid.n_nodes(); ++j)
      total += grid.r_weights[j] *
               g(grid.r_nodes[j], u.values()(ray, j), v.values()(ray, j)) *
               radial_weight(grid.r_nodes[j], d);
    return total;
  }
  std::vector<Real> splits;
  for (const GridFunction* f : {&u, &v})
    if (f->is_piecewise(ray))
      for (const RayPiece& piece : f->ray_profile(ray)) splits.push_back(piece.lo);
  std::sort(splits.begin(), splits.end());
  splits.push_back(grid.r_max);

  // pieces are right-open, so a piecewise operand evaluated exactly at a
  // segment end would read the next piece; freeze its (constant) value at the
  // segment midpoint instead
  const bool up = u.is_piecewise(ray), vp = v.is_piecewise(ray);
  Real total = 0.0, a = 0.0;
  for (Real s : splits) {
    if (!(s > a && s <= grid.r_max)) continue;
    const Real mid = 0.5 * (a + s);
    const Real uc = up ? u.value_at(ray, mid) : 0.0;
    const Real vc = vp ? v.value_at(ray, mid) : 0.0;
    total += simpson(
        [&](Real r) {
          return g(r, up ? uc : u.value_at(ray, r), vp ? vc : v.value_at(ray, r)) *
                 radial_weight(r, d);
        },
        a, s, grid.h());
    a = s;
  }
  return total;
}

// --- operations ----------------------------------------------------------

// True when every ray carries the same profile (radially symmetric data);
// aggregations then evaluate one ray and scale by the total direction weight.
bool all_rays_identical(const GridFunction& u);

Real ray_lp_mass(const GridFunction& u, Index ray, Real p);
Real lp_mass(const GridFunction& u, Real p);
bool in_constraint_set(const GridFunction& u, Real a, Real p, Real tol_mass = 1e-6);

Real evaluate_functional(const Integrand& F, const GridFunction& u);

GridFunction build_maximizer(const BallProfile& profile, GridPtr grid);

// Canonical per-ray measure u(r nu_i)^p r^{dim-1} dr. Piecewise rays convert
// exactly; sampled rays get one coefficient per Simpson panel, matched to the
// panel's quadrature mass so total mass agrees with lp_mass bit-for-bit.
PiecewisePowerDensity canonical_ray_density(const GridFunction& u, Index ray, Real p);

Real kappa(const GridFunction& u, Index ray, Real a, Real p);
RaySet build_auxiliary(const GridFunction& u, Real a, Real p);

// v = height * indicator of the star-shaped set.
GridFunction indicator_from_rays(const RaySet& G, Real height);
Real set_volume(const RaySet& G);

// int |u - v|^p over R^dim (polar quadrature).
Real lp_distance(const GridFunction& u, const GridFunction& v, Real p);

// Halve the radial resolution (piecewise rays transfer exactly, sampled rays
// keep every other node). Needs at least 32 subintervals.
GridFunction coarsen(const GridFunction& u);

// rows: direction index, radius, value
void write_grid_function_csv(const GridFunction& u, std::ostream& os);

}  // namespace ballmax
