#pragma once

#include <string>
#include <vector>

#include "ballmax/radial.hpp"
#include "ballmax/ray_density.hpp"
#include "ballmax/types.hpp"

namespace ballmax {

// Monotone rearrangement of one ray measure onto another, T = Q_target o
// C_source with the left-continuous generalized inverse Q. Where the source
// density vanishes the map is pinned to the nearest target support point;
// such nodes are excluded from pointwise invariant checks.
struct MonotoneMap1D {
  PiecewisePowerDensity source, target;
  ArrayXr source_nodes;     // grid radii
  ArrayXr map_values;       // T at the grid radii
  ArrayXr source_density;   // densities sampled at the grid radii
  ArrayXr target_density;

  Real apply(Real r) const;
  // Preimage of a target radius under the map (via the source quantile).
  Real preimage(Real t) const;
};

// Requires equal total masses within tol_mass (absolute, scaled by the
// larger mass when that exceeds one).
MonotoneMap1D monotone_transport_1d(const PiecewisePowerDensity& source,
                                    const PiecewisePowerDensity& target,
                                    const ArrayXr& nodes, Real tol_mass = 1e-8);

// Integral of psi(r, T(r)) against the source measure. Exact segment splits
// at the density breakpoints and their target-side preimages; the square-root
// kink of T at the source support edge (dim >= 2, target support reaching 0)
// is integrated in target coordinates. extra_target_splits lists additional
// target radii whose preimages must split the integration (e.g. indicator
// endpoints).
template <class Psi>
Real integrate_against_source(const MonotoneMap1D& map, Psi&& psi, Real h_grid,
                              const std::vector<Real>& extra_target_splits = {});

struct PushforwardRow {
  std::string name;
  Real lhs = 0.0;   // int H d(target)
  Real rhs = 0.0;   // int H(T) d(source)
  Real rel_err = 0.0;
};

// Five standard test functions: 1, r, r^2, exp(-r), and the indicator of the
// middle half of the target support.
std::vector<PushforwardRow> verify_pushforward(const MonotoneMap1D& map, Real h_grid);

// --- set transport -------------------------------------------------------

struct CellSet {
  MatrixXr centers;  // count x dim
  Real cell_size = 0.0;
  Real discarded_volume = 0.0;   // trimmed during count equalization
  Real boundary_volume = 0.0;    // cells within one diameter of a set boundary
};

// Axis-aligned lattice cells covering the set difference: first component has
// the cells of G \ E (transport sources), second the cells of E \ G
// (targets). Counts are equalized by discarding surplus cells closest to the
// sphere of radius E.radius. Throws when a side exceeds 400 cells or the trim
// removes more than 2% of a side.
std::pair<CellSet, CellSet> discretize_sets(const BallProfile& E, const RaySet& G,
                                            Real cell_size);

struct CellAssignment {
  MatrixXr source, target;      // count x dim
  std::vector<Index> pairing;   // source i -> target pairing[i]
  Real cell_volume = 0.0;
  Real cell_diameter = 0.0;
  Real total_cost = 0.0;        // sum of squared pair distances
};

// Exact minimum-cost bijection for squared Euclidean cost: exhaustive search
// up to 8 cells, shortest-augmenting-path assignment up to 400. force_general
// runs the assignment algorithm even on small instances, so it can be checked
// against the exhaustive answer.
CellAssignment assign_min_cost(const CellSet& source, const CellSet& target,
                               bool force_general = false);

struct InwardReport {
  Index pair_count = 0;
  Real inward_fraction = 1.0;         // |T(x)| <= |x| + cell diameter
  Real targets_inside_fraction = 1.0; // targets inside the ball E
};

InwardReport verify_inward(const CellAssignment& assignment, const BallProfile& E);

// rows: source coordinates, target coordinates, squared distance
void write_assignment_csv(const CellAssignment& assignment, std::ostream& os);

// --- implementation of the template -------------------------------------

namespace detail {
std::vector<Real> source_splits(const MonotoneMap1D& map,
                                const std::vector<Real>& extra_target_splits);

// Integral of g(r) against mu over [lo, hi], split at the density breaks and
// the extra points. The piece coefficient is resolved once per segment at its
// midpoint: pieces are right-open, so evaluating the density exactly at a
// downward jump would read the far side.
template <class G>
Real integrate_measure_segments(const PiecewisePowerDensity& mu, Real lo, Real hi,
                                Real h_target, std::vector<Real> splits, G&& g) {
  if (!(hi > lo)) return 0.0;
  splits.insert(splits.end(), mu.breaks().begin(), mu.breaks().end());
  std::sort(splits.begin(), splits.end());
  splits.push_back(hi);
  Real total = 0.0, a = lo;
  for (Real s : splits) {
    if (!(s > a && s <= hi)) continue;
    const Real mid = 0.5 * (a + s);
    const Real w_mid = radial_weight(mid, mu.dim());
    const Real coeff = w_mid > 0.0 ? mu.density(mid) / w_mid : 0.0;
    if (coeff != 0.0)
      total += coeff * simpson(
                           [&](Real r) { return g(r) * radial_weight(r, mu.dim()); },
                           a, s, h_target);
    a = s;
  }
  return total;
}

}  // namespace detail

template <class Psi>
Real integrate_against_source(const MonotoneMap1D& map, Psi&& psi, Real h_grid,
                              const std::vector<Real>& extra_target_splits) {
  if (map.source.mass() <= 0.0) return 0.0;
  std::vector<Real> splits = detail::source_splits(map, extra_target_splits);

  const Real r0 = map.source.support_begin();
  Real patch_end = r0;
  const bool singular =
      map.source.dim() >= 2 && map.target.support_begin() == 0.0 && r0 > 0.0;
  Real total = 0.0;
  if (singular) {
    // T(r) ~ (r^n - r0^n)^{1/n} near r0: swap to target coordinates over the
    // whole first smooth segment, where the inverse map is analytic.
    patch_end = map.source.support_end();
    for (Real s : splits)
      if (s > r0 && s < patch_end) patch_end = s;
    const Real s_hi = map.apply(patch_end);
    total += gauss(
        [&](Real s) {
          return psi(map.preimage(s), s) * map.target.density(s);
        },
        map.target.support_begin(), s_hi, 16);
  }
  total += detail::integrate_measure_segments(
      map.source, patch_end, map.source.r_max(), h_grid, std::move(splits),
      [&](Real r) { return psi(r, map.apply(r)); });
  return total;
}

}  // namespace ballmax
