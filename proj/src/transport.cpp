#include "ballmax/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ballmax {

Real MonotoneMap1D::apply(Real r) const {
  return target.quantile(source.cdf(r));
}

Real MonotoneMap1D::preimage(Real t) const {
  return source.quantile(target.cdf(t));
}

MonotoneMap1D monotone_transport_1d(const PiecewisePowerDensity& source,
                                    const PiecewisePowerDensity& target,
                                    const ArrayXr& nodes, Real tol_mass) {
  if (source.dim() != target.dim())
    throw std::invalid_argument("monotone_transport_1d: dimension mismatch");
  const Real mismatch = std::abs(source.mass() - target.mass());
  if (mismatch > tol_mass * std::max(1.0, std::max(source.mass(), target.mass())))
    throw std::invalid_argument("monotone_transport_1d: masses do not match");

  MonotoneMap1D map;
  map.source = source;
  map.target = target;
  map.source_nodes = nodes;
  map.map_values = ArrayXr(nodes.size());
  map.source_density = ArrayXr(nodes.size());
  map.target_density = ArrayXr(nodes.size());
  for (Index j = 0; j < nodes.size(); ++j) {
    map.map_values[j] = map.apply(nodes[j]);
    map.source_density[j] = source.density(nodes[j]);
    map.target_density[j] = target.density(nodes[j]);
  }
  return map;
}

namespace detail {

std::vector<Real> source_splits(const MonotoneMap1D& map,
                                const std::vector<Real>& extra_target_splits) {
  std::vector<Real> splits;
  splits.insert(splits.end(), map.source.breaks().begin(), map.source.breaks().end());
  for (Real t : map.target.breaks()) splits.push_back(map.preimage(t));
  for (Real t : extra_target_splits) splits.push_back(map.preimage(t));
  return splits;
}

}  // namespace detail

std::vector<PushforwardRow> verify_pushforward(const MonotoneMap1D& map, Real h_grid) {
  const Real s_end = map.target.support_end();
  const Real win_lo = 0.25 * s_end, win_hi = 0.75 * s_end;

  struct TestFn {
    std::string name;
    std::function<Real(Real)> h;
    bool indicator;
  };
  const std::vector<TestFn> fns = {
      {"one", [](Real) { return 1.0; }, false},
      {"r", [](Real t) { return t; }, false},
      {"r_squared", [](Real t) { return t * t; }, false},
      {"exp_neg_r", [](Real t) { return std::exp(-t); }, false},
      {"window", [win_lo, win_hi](Real t) { return (t >= win_lo && t <= win_hi) ? 1.0 : 0.0; },
       true},
  };

  std::vector<PushforwardRow> rows;
  rows.reserve(fns.size());
  for (const TestFn& fn : fns) {
    PushforwardRow row;
    row.name = fn.name;
    if (fn.indicator) {
      // piecewise-constant observables integrate cell-exactly: the splits
      // make H (resp. H o T) constant per segment, so sum exact segment
      // masses weighted by the midpoint value
      std::vector<Real> t_splits(map.target.breaks());
      t_splits.push_back(win_lo);
      t_splits.push_back(win_hi);
      std::sort(t_splits.begin(), t_splits.end());
      Real lhs = 0.0;
      for (std::size_t k = 0; k + 1 < t_splits.size(); ++k) {
        if (!(t_splits[k + 1] > t_splits[k])) continue;
        lhs += fn.h(0.5 * (t_splits[k] + t_splits[k + 1])) *
               (map.target.cdf(t_splits[k + 1]) - map.target.cdf(t_splits[k]));
      }
      std::vector<Real> s_splits = detail::source_splits(map, {win_lo, win_hi});
      std::sort(s_splits.begin(), s_splits.end());
      Real rhs = 0.0;
      for (std::size_t k = 0; k + 1 < s_splits.size(); ++k) {
        if (!(s_splits[k + 1] > s_splits[k])) continue;
        rhs += fn.h(map.apply(0.5 * (s_splits[k] + s_splits[k + 1]))) *
               (map.source.cdf(s_splits[k + 1]) - map.source.cdf(s_splits[k]));
      }
      row.lhs = lhs;
      row.rhs = rhs;
    } else {
      row.lhs = detail::integrate_measure_segments(
          map.target, 0.0, map.target.r_max(), h_grid, {},
          [&](Real t) { return fn.h(t); });
      row.rhs = integrate_against_source(
          map, [&](Real, Real t) { return fn.h(t); }, h_grid);
    }
    row.rel_err = std::abs(row.lhs - row.rhs) /
                  std::max({std::abs(row.lhs), std::abs(row.rhs), 1e-30});
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

Index nearest_direction(const RadialGrid& grid, const VectorXr& x, Real r) {
  if (grid.dim == 1) return x[0] >= 0.0 ? 0 : 1;
  if (grid.dim == 2) {
    const Real theta = std::atan2(x[1], x[0]);
    const Real step = 2.0 * std::numbers::pi / static_cast<Real>(grid.n_dir());
    Index i = static_cast<Index>(std::llround(theta / step));
    i %= grid.n_dir();
    if (i < 0) i += grid.n_dir();
    return i;
  }
  Index best = 0;
  Real best_dot = -std::numeric_limits<Real>::infinity();
  for (Index i = 0; i < grid.n_dir(); ++i) {
    const Real dot = grid.directions.row(i).dot(x.transpose()) / r;
    if (dot > best_dot) {
      best_dot = dot;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::pair<CellSet, CellSet> discretize_sets(const BallProfile& E, const RaySet& G,
                                            Real cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("discretize_sets: bad cell size");
  const RadialGrid& grid = *G.grid;
  const int d = grid.dim;
  const Real s = cell_size;
  const Real diam = s * std::sqrt(static_cast<Real>(d));
  const Real reach = std::max(E.radius, G.kappa.maxCoeff()) + diam;
  const Index K = static_cast<Index>(std::ceil(reach / s));

  struct Cell {
    VectorXr x;
    Real r;
    Real margin;
  };
  std::vector<Cell> src, tgt;
  Real src_boundary = 0.0, tgt_boundary = 0.0;
  const Real cell_vol = std::pow(s, static_cast<Real>(d));

  std::vector<Index> idx(static_cast<std::size_t>(d), -K);
  VectorXr x(d);
  const Index total_axes = d;
  while (true) {
    for (Index ax = 0; ax < total_axes; ++ax)
      x[ax] = (static_cast<Real>(idx[static_cast<std::size_t>(ax)]) + 0.5) * s;
    const Real r = x.norm();
    if (r <= reach) {
      const bool in_E = r < E.radius;
      const Real kap = G.kappa[nearest_direction(grid, x, std::max(r, 1e-300))];
      const bool in_G = r < kap;
      if (in_E != in_G) {
        Cell cell{x, r, std::abs(r - E.radius)};  // margin drives the trim order
        const bool near_boundary =
            std::min(cell.margin, std::abs(r - kap)) <= diam;
        if (in_G) {
          src.push_back(std::move(cell));
          if (near_boundary) src_boundary += cell_vol;
        } else {
          tgt.push_back(std::move(cell));
          if (near_boundary) tgt_boundary += cell_vol;
        }
        if (src.size() > 400 || tgt.size() > 400)
          throw std::invalid_argument(
              "discretize_sets: more than 400 cells per side; increase cell_size");
      }
    }
    // advance the lattice index
    Index ax = 0;
    while (ax < total_axes) {
      if (++idx[static_cast<std::size_t>(ax)] < K) break;
      idx[static_cast<std::size_t>(ax)] = -K;
      ++ax;
    }
    if (ax == total_axes) break;
  }

  CellSet source, target;
  source.cell_size = target.cell_size = s;
  source.boundary_volume = src_boundary;
  target.boundary_volume = tgt_boundary;

  if (src.empty() || tgt.empty()) {
    // set difference below cell resolution: transport step is skipped
    source.centers = MatrixXr(0, d);
    target.centers = MatrixXr(0, d);
    return {source, target};
  }

  // equalize counts, discarding surplus cells nearest a set boundary
  auto trim = [&](std::vector<Cell>& cells, std::size_t keep, CellSet& out) {
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
      return cells[lhs].margin < cells[rhs].margin;
    });
    const std::size_t drop = cells.size() - keep;
    out.discarded_volume = static_cast<Real>(drop) * cell_vol;
    std::vector<char> dead(cells.size(), 0);
    for (std::size_t k = 0; k < drop; ++k) dead[order[k]] = 1;
    out.centers = MatrixXr(static_cast<Index>(keep), d);
    Index row = 0;
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (!dead[k]) out.centers.row(row++) = cells[k].x.transpose();
  };

  const std::size_t keep = std::min(src.size(), tgt.size());
  const std::size_t surplus = std::max(src.size(), tgt.size()) - keep;
  if (surplus > 0 &&
      static_cast<Real>(surplus) > 0.02 * static_cast<Real>(std::max(src.size(), tgt.size())))
    throw std::invalid_argument("discretize_sets: count mismatch above 2%; "
                                "decrease cell_size");
  trim(src, keep, source);
  trim(tgt, keep, target);
  return {source, target};
}

namespace {

// shortest augmenting path assignment with potentials, exact for real costs
std::vector<Index> solve_assignment(const MatrixXr& cost) {
  const Index n = cost.rows();
  const Real inf = std::numeric_limits<Real>::infinity();
  std::vector<Real> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Real> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Index> match(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Index> way(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<Real> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      Real delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const Real cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                         v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> pairing(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j)
    pairing[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return pairing;
}

}  // namespace

CellAssignment assign_min_cost(const CellSet& source, const CellSet& target,
                               bool force_general) {
  if (source.centers.rows() != target.centers.rows())
    throw std::invalid_argument("assign_min_cost: cell counts differ");
  if (source.centers.rows() > 400)
    throw std::invalid_argument("assign_min_cost: more than 400 cells");
  const Index n = source.centers.rows();
  const int d = static_cast<int>(source.centers.cols());

  CellAssignment out;
  out.source = source.centers;
  out.target = target.centers;
  out.cell_volume = std::pow(source.cell_size, static_cast<Real>(d));
  out.cell_diameter = source.cell_size * std::sqrt(static_cast<Real>(d));
  if (n == 0) return out;

  MatrixXr cost(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      cost(i, j) = (source.centers.row(i) - target.centers.row(j)).squaredNorm();

  if (n <= 8 && !force_general) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Index> best = perm;
    Real best_cost = std::numeric_limits<Real>::infinity();
    do {
      Real c = 0.0;
      for (Index i = 0; i < n; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.pairing = best;
    out.total_cost = best_cost;
    return out;
  }

  out.pairing = solve_assignment(cost);
  out.total_cost = 0.0;
  for (Index i = 0; i < n; ++i) out.total_cost += cost(i, out.pairing[static_cast<std::size_t>(i)]);
  return out;
}

InwardReport verify_inward(const CellAssignment& assignment, const BallProfile& E) {
  InwardReport rep;
  rep.pair_count = assignment.source.rows();
  if (rep.pair_count == 0) return rep;
  Index inward = 0, inside = 0;
  for (Index i = 0; i < rep.pair_count; ++i) {
    const Real rs = assignment.source.row(i).norm();
    const Real rt = assignment.target.row(assignment.pairing[static_cast<std::size_t>(i)]).norm();
    if (rt <= rs + assignment.cell_diameter) ++inward;
    if (rt < E.radius) ++inside;
  }
  rep.inward_fraction = static_cast<Real>(inward) / static_cast<Real>(rep.pair_count);
  rep.targets_inside_fraction =
      static_cast<Real>(inside) / static_cast<Real>(rep.pair_count);
  return rep;
}

void write_assignment_csv(const CellAssignment& assignment, std::ostream& os) {
  const int d = static_cast<int>(assignment.source.cols());
  os << "pair";
  for (int k = 0; k < d; ++k) os << ",source_" << k;
  for (int k = 0; k < d; ++k) os << ",target_" << k;
  os << ",squared_distance\n";
  char buf[64];
  for (Index i = 0; i < assignment.source.rows(); ++i) {
    os << i;
    const Index j = assignment.pairing[static_cast<std::size_t>(i)];
    for (int k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof(buf), ",%.17g", assignment.source(i, k));
      os << buf;
    }
    for (int k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof(buf), ",%.17g", assignment.target(j, k));
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g\n",
                  (assignment.source.row(i) - assignment.target.row(j)).squaredNorm());
    os << buf;
  }
}

}  // namespace ballmax
